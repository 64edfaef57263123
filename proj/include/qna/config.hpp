#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qna/error.hpp"
#include "qna/ingest.hpp"
#include "qna/signals.hpp"
#include "qna/spectra.hpp"
#include "qna/states.hpp"
#include "qna/synth.hpp"

namespace qna {

/// Flat `key = value` file. `#` starts a comment; values may be double-quoted;
/// a repeated key accumulates values in order.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, const std::string& source = "<config>") {
    KeyValueConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::string_view text = line;
      bool quoted = false;
      for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '"') quoted = !quoted;
        if (text[i] == '#' && !quoted) {
          text = text.substr(0, i);
          break;
        }
      }
      text = detail::trim(text);
      if (text.empty()) continue;
      const auto eq = text.find('=');
      require(eq != std::string_view::npos, ErrorKind::config,
              source + ":" + std::to_string(line_no) + ": expected 'key = value'");
      const auto key = detail::trim(text.substr(0, eq));
      auto value = detail::trim(text.substr(eq + 1));
      require(!key.empty(), ErrorKind::config, source + ":" + std::to_string(line_no) + ": empty key");
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
      cfg.values_[std::string(key)].emplace_back(value);
    }
    return cfg;
  }

  static KeyValueConfig load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open config '" + path.string() + "'");
    return parse(in, path.string());
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::optional<std::string> get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second.back();
  }

  std::vector<std::string> all(const std::string& key) const {
    const auto it = values_.find(key);
    return it == values_.end() ? std::vector<std::string>{} : it->second;
  }

  std::vector<std::string> keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_) out.push_back(k);
    return out;
  }

 private:
  std::map<std::string, std::vector<std::string>> values_;
};

namespace detail {

inline int to_int(const std::string& key, const std::string& value) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  require(ec == std::errc() && ptr == value.data() + value.size(), ErrorKind::config,
          "'" + key + "' expects an integer, got '" + value + "'");
  return out;
}

inline double to_double(const std::string& key, const std::string& value) {
  const auto v = parse_double(value);
  require(v.has_value(), ErrorKind::config, "'" + key + "' expects a number, got '" + value + "'");
  return *v;
}

}  // namespace detail

/// `A1,A2|B1,B2` with an optional `@tensor` / `@mixture` suffix.
inline Partition parse_partition(std::string_view text) {
  Partition p;
  const auto at = text.find('@');
  if (at != std::string_view::npos) {
    p.mode = parse_partition_mode(detail::trim(text.substr(at + 1)));
    text = text.substr(0, at);
  }
  const auto bar = text.find('|');
  require(bar != std::string_view::npos, ErrorKind::config,
          "partition '" + std::string(text) + "' must look like 'A1,A2|B1,B2'");
  const auto group = [](std::string_view s) {
    std::vector<std::string> out;
    for (auto t : detail::split(s, ','))
      if (!t.empty()) out.emplace_back(t);
    return out;
  };
  p.group_a = group(text.substr(0, bar));
  p.group_b = group(text.substr(bar + 1));
  p.validate();
  return p;
}

inline std::string format_partition(const Partition& p) {
  std::string out;
  for (std::size_t i = 0; i < p.group_a.size(); ++i) out += (i ? "," : "") + p.group_a[i];
  out += "|";
  for (std::size_t i = 0; i < p.group_b.size(); ++i) out += (i ? "," : "") + p.group_b[i];
  out += "@";
  out += p.mode == PartitionMode::tensor_bipartite ? "tensor" : "mixture";
  return out;
}

/// Series standardized by QEWS.
enum class QewsSource { eri, entropy, purity };

inline QewsSource parse_qews_source(std::string_view text) {
  if (text == "eri") return QewsSource::eri;
  if (text == "entropy" || text == "quantum_entropy") return QewsSource::entropy;
  if (text == "purity") return QewsSource::purity;
  fail(ErrorKind::config, "unknown QEWS source '" + std::string(text) + "'");
}

inline std::string_view to_string(QewsSource s) {
  switch (s) {
    case QewsSource::eri: return "eri";
    case QewsSource::entropy: return "entropy";
    case QewsSource::purity: return "purity";
  }
  return "eri";
}

struct OutputFormats {
  bool csv = true;
  bool json = true;
  bool svg = false;
};

inline OutputFormats parse_formats(std::string_view text) {
  OutputFormats f{false, false, false};
  for (auto t : detail::split(text, ',')) {
    if (t == "csv") f.csv = true;
    else if (t == "json") f.json = true;
    else if (t == "svg") f.svg = true;
    else if (!t.empty()) fail(ErrorKind::config, "unknown output format '" + std::string(t) + "'");
  }
  return f;
}

struct RunConfig {
  std::filesystem::path data_path;
  std::filesystem::path output_dir = "qna-out";
  IngestConfig ingest;
  StateConstruction construction;
  int qews_window = 60;
  QewsMode qews_mode = QewsMode::level_zscore;
  QewsSource qews_source = QewsSource::eri;
  EntropyBase entropy_base = EntropyBase::natural;
  int risk_horizon = 30;
  std::vector<Partition> partitions;
  std::optional<EventWindow> event;
  OutputFormats formats;

  void validate() const {
    construction.validate();
    require(qews_window >= 3, ErrorKind::config, "qews_window must be >= 3");
    require(risk_horizon >= 2, ErrorKind::config, "risk_horizon must be >= 2");
    require(!data_path.empty(), ErrorKind::config, "no data file given");
    for (const auto& p : partitions) p.validate();
    if (event)
      require(event->pre_days >= 1 && event->post_days >= 1, ErrorKind::config,
              "event_pre and event_post must be >= 1");
  }

  /// Overlays keys from a config file. Unknown keys are an error.
  void apply(const KeyValueConfig& kv) {
    for (const auto& key : kv.keys()) {
      const auto value = *kv.get(key);
      if (key == "data") data_path = value;
      else if (key == "output_dir") output_dir = value;
      else if (key == "construction") construction.mode = parse_construction(value);
      else if (key == "window") construction.window = detail::to_int(key, value);
      else if (key == "qews_window") qews_window = detail::to_int(key, value);
      else if (key == "qews_mode") qews_mode = parse_qews_mode(value);
      else if (key == "qews_source") qews_source = parse_qews_source(value);
      else if (key == "entropy_base") entropy_base = parse_entropy_base(value);
      else if (key == "risk_horizon") risk_horizon = detail::to_int(key, value);
      else if (key == "max_ffill") ingest.max_ffill = detail::to_int(key, value);
      else if (key == "vol_window") ingest.vol_window = detail::to_int(key, value);
      else if (key == "min_history") ingest.min_history = detail::to_int(key, value);
      else if (key == "formats") formats = parse_formats(value);
      else if (key == "partition") {
        partitions.clear();
        for (const auto& p : kv.all(key)) partitions.push_back(parse_partition(p));
      } else if (key == "event_date") {
        if (!event) event = EventWindow{};
        event->event_date = Date::parse(value);
      } else if (key == "event_pre") {
        if (!event) event = EventWindow{};
        event->pre_days = detail::to_int(key, value);
      } else if (key == "event_post") {
        if (!event) event = EventWindow{};
        event->post_days = detail::to_int(key, value);
      } else {
        fail(ErrorKind::config, "unknown config key '" + key + "'");
      }
    }
  }
};

/// `start:loading`, e.g. `250:0.9`.
inline SynthRegime parse_regime(std::string_view text) {
  const auto colon = text.find(':');
  require(colon != std::string_view::npos, ErrorKind::config,
          "regime '" + std::string(text) + "' must look like 'start_day:loading'");
  return {detail::to_int("regime", std::string(detail::trim(text.substr(0, colon)))),
          detail::to_double("regime", std::string(detail::trim(text.substr(colon + 1))))};
}

/// `ramp_start:shock_day[:peak_loading]`.
inline SynthEvent parse_synth_event(std::string_view text) {
  const auto parts = detail::split(text, ':');
  require(parts.size() == 2 || parts.size() == 3, ErrorKind::config,
          "event '" + std::string(text) + "' must look like 'ramp_start:shock_day[:peak]'");
  SynthEvent e;
  e.ramp_start = detail::to_int("event", std::string(parts[0]));
  e.shock_day = detail::to_int("event", std::string(parts[1]));
  if (parts.size() == 3) e.peak_loading = detail::to_double("event", std::string(parts[2]));
  return e;
}

inline void apply(SynthConfig& cfg, const KeyValueConfig& kv) {
  for (const auto& key : kv.keys()) {
    const auto value = *kv.get(key);
    if (key == "n_assets") cfg.n_assets = detail::to_int(key, value);
    else if (key == "n_days") cfg.n_days = detail::to_int(key, value);
    else if (key == "seed") cfg.seed = std::uint64_t(detail::to_int(key, value));
    else if (key == "idio_vol") cfg.idio_vol = detail::to_double(key, value);
    else if (key == "factor_vol") cfg.factor_vol = detail::to_double(key, value);
    else if (key == "base_volume") cfg.base_volume = detail::to_double(key, value);
    else if (key == "start_date") cfg.start_date = Date::parse(value);
    else if (key == "event") cfg.event = parse_synth_event(value);
    else if (key == "regime") {
      cfg.regimes.clear();
      for (const auto& r : kv.all(key)) cfg.regimes.push_back(parse_regime(r));
    } else {
      fail(ErrorKind::config, "unknown synth config key '" + key + "'");
    }
  }
}

}  // namespace qna
