#pragma once

#include "qna/calendar.hpp"
#include "qna/config.hpp"
#include "qna/error.hpp"
#include "qna/ingest.hpp"
#include "qna/io.hpp"
#include "qna/linalg.hpp"
#include "qna/pipeline.hpp"
#include "qna/signals.hpp"
#include "qna/spectra.hpp"
#include "qna/states.hpp"
#include "qna/svg.hpp"
#include "qna/synth.hpp"
