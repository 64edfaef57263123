#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qna/calendar.hpp"
#include "qna/error.hpp"
#include "qna/ingest.hpp"
#include "qna/signals.hpp"

namespace qna {

using Json = nlohmann::ordered_json;

/// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

// ---------------------------------------------------------------------------
// Panel CSV (ingest schema)

inline std::string panel_csv(const std::vector<RawBar>& bars) {
  std::string out = "date,ticker,close,volume\n";
  for (const auto& b : bars) {
    out += b.date.iso();
    out += ',';
    out += b.ticker;
    out += ',';
    out += format_double(b.close);
    out += ',';
    out += format_double(b.volume);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Indicator CSV: date,indicator,value,flag

inline std::string indicator_csv(const std::vector<IndicatorSeries>& series) {
  std::string out = "date,indicator,value,flag\n";
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      out += s.dates[i].iso();
      out += ',';
      out += s.name;
      out += ',';
      if (s.has_value(i)) out += format_double(s.values[i]);
      out += ',';
      out += to_string(s.flags[i]);
      out += '\n';
    }
  }
  return out;
}

/// Series in order of first appearance.
inline std::vector<IndicatorSeries> parse_indicator_csv(std::istream& in, const std::string& source = "<stream>") {
  std::vector<IndicatorSeries> out;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::trim(line);
    if (text.empty()) continue;
    const auto where = source + ":" + std::to_string(line_no);
    if (!have_header) {
      require(text == "date,indicator,value,flag", ErrorKind::parse,
              where + ": expected header 'date,indicator,value,flag'");
      have_header = true;
      continue;
    }
    const auto cols = detail::split(text, ',');
    require(cols.size() == 4, ErrorKind::parse, where + ": expected 4 columns");
    IndicatorSeries* target = nullptr;
    for (auto& s : out)
      if (s.name == cols[1]) target = &s;
    if (!target) {
      out.emplace_back();
      out.back().name = std::string(cols[1]);
      target = &out.back();
    }
    Date d;
    ValueFlag flag;
    try {
      d = Date::parse(cols[0]);
      flag = parse_value_flag(cols[3]);
    } catch (const Error& e) {
      fail(ErrorKind::parse, where + ": " + e.what());
    }
    if (flag == ValueFlag::missing) {
      target->push_missing(d);
    } else {
      const auto v = detail::parse_double(cols[2]);
      require(v.has_value(), ErrorKind::parse, where + ": malformed value '" + std::string(cols[2]) + "'");
      target->push(d, *v, flag);
    }
  }
  require(have_header, ErrorKind::parse, source + ": empty indicator file");
  for (const auto& s : out) s.validate();
  return out;
}

inline std::vector<IndicatorSeries> read_indicator_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open '" + path.string() + "'");
  return parse_indicator_csv(in, path.string());
}

// ---------------------------------------------------------------------------
// JSON reports

inline Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json to_json(const EventReport& r) {
  Json j;
  j["pre_mean"] = number_or_null(r.pre_mean);
  j["pre_max"] = number_or_null(r.pre_max);
  j["pre_max_date"] = r.pre_max_date.iso();
  j["pre_slope"] = number_or_null(r.pre_slope);
  j["post_mean"] = number_or_null(r.post_mean);
  j["post_min"] = number_or_null(r.post_min);
  j["post_change_sign"] = r.post_change_sign;
  return j;
}

inline EventReport event_report_from_json(const Json& j) {
  const auto num = [&](const char* key) {
    const auto& v = j.at(key);
    return v.is_null() ? kNaN : v.get<double>();
  };
  EventReport r;
  r.pre_mean = num("pre_mean");
  r.pre_max = num("pre_max");
  r.pre_max_date = Date::parse(j.at("pre_max_date").get<std::string>());
  r.pre_slope = num("pre_slope");
  r.post_mean = num("post_mean");
  r.post_min = num("post_min");
  r.post_change_sign = j.at("post_change_sign").get<int>();
  return r;
}

inline Json to_json(const RegimeStats& s) {
  Json j;
  j["count"] = s.count;
  j["mean"] = number_or_null(s.mean);
  j["std"] = number_or_null(s.stddev);
  return j;
}

inline Json to_json(const RiskAssociation& r) {
  Json j;
  j["horizon"] = r.horizon;
  j["n"] = r.n;
  j["volatility_corr"] = number_or_null(r.volatility_corr);
  j["drawdown_corr"] = number_or_null(r.drawdown_corr);
  return j;
}

// ---------------------------------------------------------------------------
// Files

/// Writes a set of files into one directory, all or nothing: each file goes to
/// a temporary name first, and everything written is removed if any step fails.
class OutputBatch {
 public:
  explicit OutputBatch(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, std::string contents) { files_.emplace_back(name, std::move(contents)); }

  std::vector<std::filesystem::path> commit() const {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_))
      fail(ErrorKind::io, "output directory '" + dir_.string() + "' is not writable");

    std::vector<fs::path> staged, committed;
    const auto rollback = [&] {
      std::error_code ignore;
      for (const auto& p : staged) fs::remove(p, ignore);
      for (const auto& p : committed) fs::remove(p, ignore);
    };
    for (const auto& [name, contents] : files_) {
      const auto tmp = dir_ / ("." + name + ".partial");
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (out) staged.push_back(tmp);
      out << contents;
      out.close();
      if (!out) {
        rollback();
        fail(ErrorKind::io, "cannot write '" + (dir_ / name).string() + "'");
      }
    }
    for (std::size_t i = 0; i < files_.size(); ++i) {
      const auto target = dir_ / files_[i].first;
      fs::rename(staged[i], target, ec);
      if (ec) {
        rollback();
        fail(ErrorKind::io, "cannot move output into place at '" + target.string() + "'");
      }
      committed.push_back(target);
    }
    return committed;
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

inline void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  const auto dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  OutputBatch batch(dir);
  batch.add(path.filename().string(), contents);
  batch.commit();
}

}  // namespace qna
