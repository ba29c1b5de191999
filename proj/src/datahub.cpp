// Copyright 2026 The prefinfer Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "prefinfer/datahub.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "prefinfer/error.hpp"
#include "prefinfer/random.hpp"

namespace prefinfer {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.emplace_back(trim(current));
  return fields;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Incremental mean: exact when every sample is identical.
struct RunningMean {
  double mean = 0.0;
  std::size_t count = 0;
  void add(double x) {
    ++count;
    mean += (x - mean) / static_cast<double>(count);
  }
};

std::vector<double> json_values(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw Error(ErrorCode::kInvalidArgument, std::string("window JSON lacks array '") + key + "'");
  }
  return j.at(key).get<std::vector<double>>();
}

}  // namespace

void DataWindow::validate() const {
  if (days < 1) throw Error(ErrorCode::kInvalidArgument, "window must span at least one day");
  for (const HourlySeries* s : {&price, &renewable, &background}) {
    if (s->start_hour != price.start_hour) {
      throw Error(ErrorCode::kInvalidArgument, "window series are not aligned");
    }
    if (s->values.size() != hours()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "window series length " + std::to_string(s->values.size()) + " != days*24");
    }
    for (double v : s->values) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw Error(ErrorCode::kInvalidArgument, "window values must be finite and non-negative");
      }
    }
  }
}

std::int64_t parse_timestamp(std::string_view text) {
  text = trim(text);
  std::int64_t epoch = 0;
  if (parse_number(text, epoch)) return epoch;

  // YYYY-MM-DD[T ]HH:MM[:SS[.frac]][Z|+HH:MM|-HH:MM]
  int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
  auto fail = [&]() -> std::int64_t {
    throw Error(ErrorCode::kInvalidArgument, "unparseable timestamp '" + std::string(text) + "'");
  };
  auto take = [&](std::string_view& s, std::size_t n, int& out) {
    if (s.size() < n || !parse_number(s.substr(0, n), out)) fail();
    s.remove_prefix(n);
  };
  auto expect = [&](std::string_view& s, std::string_view chars) {
    if (s.empty() || chars.find(s.front()) == std::string_view::npos) fail();
    s.remove_prefix(1);
  };

  std::string_view s = text;
  take(s, 4, year);
  expect(s, "-");
  take(s, 2, month);
  expect(s, "-");
  take(s, 2, day);
  if (!s.empty()) {
    expect(s, "T ");
    take(s, 2, hour);
    expect(s, ":");
    take(s, 2, minute);
    if (!s.empty() && s.front() == ':') {
      s.remove_prefix(1);
      take(s, 2, second);
      if (!s.empty() && s.front() == '.') {
        s.remove_prefix(1);
        while (!s.empty() && std::isdigit(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
      }
    }
  }
  std::int64_t offset = 0;
  if (!s.empty()) {
    if (s == "Z") {
      s.remove_prefix(1);
    } else if (s.front() == '+' || s.front() == '-') {
      const int sign = s.front() == '-' ? -1 : 1;
      s.remove_prefix(1);
      int oh = 0, om = 0;
      take(s, 2, oh);
      if (!s.empty() && s.front() == ':') s.remove_prefix(1);
      if (!s.empty()) take(s, 2, om);
      offset = sign * (static_cast<std::int64_t>(oh) * 3600 + om * 60);
    }
  }
  if (!s.empty()) fail();

  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                           std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok() || hour > 23 || minute > 59 || second > 60) fail();
  const std::int64_t days_since_epoch = sys_days{ymd}.time_since_epoch().count();
  return days_since_epoch * 86400 + hour * 3600 + minute * 60 + second - offset;
}

std::vector<SeriesPoint> parse_csv_text(std::string_view text, const ColumnSpec& columns) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = text.find('\n', pos);
    const std::size_t stop = end == std::string_view::npos ? text.size() : end;
    lines.push_back(text.substr(pos, stop - pos));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  std::size_t header_line = 0;
  while (header_line < lines.size() && trim(lines[header_line]).empty()) ++header_line;
  if (header_line == lines.size()) throw Error(ErrorCode::kEmptyFile, "no header row");

  std::string_view header_text = lines[header_line];
  if (header_text.starts_with("\xEF\xBB\xBF")) header_text.remove_prefix(3);
  const auto header = split_fields(header_text);
  auto column_index = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(ErrorCode::kMissingColumn, "column '" + name + "' not in header");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t ts_col = column_index(columns.timestamp);
  const std::size_t value_col = column_index(columns.value);

  std::vector<SeriesPoint> raw;
  for (std::size_t i = header_line + 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::size_t line_no = i + 1;
    const auto fields = split_fields(lines[i]);
    if (fields.size() <= std::max(ts_col, value_col)) {
      throw UnparseableRow(line_no, "too few fields");
    }
    SeriesPoint p;
    try {
      p.timestamp = parse_timestamp(fields[ts_col]);
    } catch (const Error&) {
      throw UnparseableRow(line_no, "bad timestamp '" + fields[ts_col] + "'");
    }
    if (!parse_number(fields[value_col], p.value) || !std::isfinite(p.value)) {
      throw UnparseableRow(line_no, "bad value '" + fields[value_col] + "'");
    }
    if (p.value < 0.0) throw UnparseableRow(line_no, "negative value");
    raw.push_back(p);
  }
  if (raw.empty()) throw Error(ErrorCode::kEmptyFile, "no data rows");

  std::stable_sort(raw.begin(), raw.end(),
                   [](const SeriesPoint& a, const SeriesPoint& b) { return a.timestamp < b.timestamp; });
  std::vector<SeriesPoint> points;
  for (std::size_t i = 0; i < raw.size();) {
    RunningMean mean;
    std::size_t j = i;
    for (; j < raw.size() && raw[j].timestamp == raw[i].timestamp; ++j) mean.add(raw[j].value);
    points.push_back({raw[i].timestamp, mean.mean});
    i = j;
  }
  return points;
}

std::vector<SeriesPoint> parse_csv(const std::filesystem::path& path, const ColumnSpec& columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv_text(buffer.str(), columns);
}

void write_csv(const std::filesystem::path& path, std::span<const SeriesPoint> points,
               const ColumnSpec& columns) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  out << columns.timestamp << ',' << columns.value << '\n';
  out << std::setprecision(17);
  for (const auto& p : points) out << p.timestamp << ',' << p.value << '\n';
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed for " + path.string());
}

HourlySeries hourly_average(std::span<const SeriesPoint> points) {
  if (points.empty()) throw Error(ErrorCode::kInvalidArgument, "hourly_average needs at least one point");
  HourlySeries out;
  out.start_hour = floor_div(points.front().timestamp, kSecondsPerHour);
  std::int64_t current = out.start_hour;
  RunningMean mean;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i > 0 && points[i].timestamp < points[i - 1].timestamp) {
      throw Error(ErrorCode::kInvalidArgument, "points must be sorted by timestamp");
    }
    const std::int64_t hour = floor_div(points[i].timestamp, kSecondsPerHour);
    if (hour != current) {
      out.values.push_back(mean.mean);
      if (hour > current + 1) throw GapInSeries(current + 1);
      current = hour;
      mean = {};
    }
    mean.add(points[i].value);
  }
  out.values.push_back(mean.mean);
  return out;
}

DataWindow align_window(const HourlySeries& price, const HourlySeries& renewable,
                        const HourlySeries& background) {
  const std::int64_t start =
      std::max({price.start_hour, renewable.start_hour, background.start_hour});
  auto end_of = [](const HourlySeries& s) {
    return s.start_hour + static_cast<std::int64_t>(s.values.size());
  };
  const std::int64_t end = std::min({end_of(price), end_of(renewable), end_of(background)});
  const std::int64_t days = end > start ? (end - start) / kHoursPerDay : 0;
  if (days < 1) {
    throw Error(ErrorCode::kInsufficientData, "series overlap by less than one full day");
  }
  DataWindow w;
  w.days = static_cast<int>(days);
  auto cut = [&](const HourlySeries& s) {
    HourlySeries r;
    r.start_hour = start;
    const auto offset = static_cast<std::ptrdiff_t>(start - s.start_hour);
    r.values.assign(s.values.begin() + offset, s.values.begin() + offset + days * kHoursPerDay);
    return r;
  };
  w.price = cut(price);
  w.renewable = cut(renewable);
  w.background = cut(background);
  w.validate();
  return w;
}

DataWindow synthesize(std::uint64_t seed, int days) {
  if (days < 1) throw Error(ErrorCode::kInvalidArgument, "days must be >= 1");

  // $/kWh by hour of day: flat night plateau, ramp down into a mid-day
  // trough, evening peak, easing back to the night level.
  static constexpr std::array<double, kHoursPerDay> kPrice = {
      0.088, 0.086, 0.080, 0.079, 0.081, 0.084, 0.087, 0.075, 0.058, 0.042, 0.030, 0.026,
      0.024, 0.025, 0.027, 0.032, 0.048, 0.068, 0.090, 0.098, 0.094, 0.090, 0.089, 0.088};
  // kW by hour of day: night base load, morning and evening bumps.
  static constexpr std::array<double, kHoursPerDay> kBackground = {
      0.32, 0.28, 0.26, 0.25, 0.25, 0.28, 0.45, 0.95, 1.00, 0.60, 0.42, 0.40,
      0.45, 0.40, 0.38, 0.40, 0.55, 0.85, 1.15, 1.35, 1.25, 1.00, 0.70, 0.45};
  constexpr int kSunrise = 6;
  constexpr int kSunset = 20;

  // 2021-05-01 00:00 UTC
  constexpr std::int64_t kStartHour = 1619827200 / kSecondsPerHour;

  DataWindow w;
  w.days = days;
  for (HourlySeries* s : {&w.price, &w.renewable, &w.background}) {
    s->start_hour = kStartHour;
    s->values.reserve(w.hours());
  }
  for (int d = 0; d < days; ++d) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(d)));
    const double peak = 2.4 + 0.6 * uniform01(rng);
    const double cloud = 0.85 + 0.15 * uniform01(rng);
    for (int h = 0; h < kHoursPerDay; ++h) {
      const double price = std::clamp(kPrice[h] * (1.0 + 0.06 * (2.0 * uniform01(rng) - 1.0)), 0.01, 0.10);
      const double background =
          std::clamp(kBackground[h] * (1.0 + 0.10 * (2.0 * uniform01(rng) - 1.0)), 0.1, 1.5);
      double renewable = 0.0;
      if (h > kSunrise && h < kSunset) {
        const double x = std::sin(std::numbers::pi * (h - kSunrise) / (kSunset - kSunrise));
        renewable = peak * cloud * std::pow(x, 1.5) * (0.95 + 0.05 * uniform01(rng));
        // Outside the 08-16 solar window the house always imports from the grid.
        if (h < 8 || h > 16) renewable = std::min(renewable, 0.5 * background);
      }
      w.price.values.push_back(price);
      w.renewable.values.push_back(std::clamp(renewable, 0.0, 3.0));
      w.background.values.push_back(background);
    }
  }
  return w;
}

DataWindow slice_window(const DataWindow& window, int day_index) {
  if (day_index < 0 || day_index >= window.days) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "day " + std::to_string(day_index) + " outside window of " + std::to_string(window.days));
  }
  const auto first = static_cast<std::ptrdiff_t>(day_index) * kHoursPerDay;
  auto cut = [&](const HourlySeries& s) {
    HourlySeries r;
    r.start_hour = s.start_hour + first;
    r.values.assign(s.values.begin() + first, s.values.begin() + first + kHoursPerDay);
    return r;
  };
  DataWindow out;
  out.days = 1;
  out.price = cut(window.price);
  out.renewable = cut(window.renewable);
  out.background = cut(window.background);
  return out;
}

nlohmann::json window_to_json(const DataWindow& window) {
  return {{"start_hour", window.start_hour()},
          {"days", window.days},
          {"price", window.price.values},
          {"renewable", window.renewable.values},
          {"background", window.background.values}};
}

DataWindow window_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("start_hour") || !j.contains("days")) {
    throw Error(ErrorCode::kInvalidArgument, "window JSON lacks start_hour/days");
  }
  DataWindow w;
  w.days = j.at("days").get<int>();
  const auto start = j.at("start_hour").get<std::int64_t>();
  w.price = {start, json_values(j, "price")};
  w.renewable = {start, json_values(j, "renewable")};
  w.background = {start, json_values(j, "background")};
  w.validate();
  return w;
}

void save_window(const std::filesystem::path& path, const DataWindow& window) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + path.string());
  out << window_to_json(window).dump(2) << '\n';
}

DataWindow load_window(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kArtifactMissing, "cannot read " + path.string());
  try {
    return window_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, path.string() + ": " + e.what());
  }
}

}  // namespace prefinfer
