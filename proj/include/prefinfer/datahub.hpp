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

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace prefinfer {

inline constexpr int kHoursPerDay = 24;
inline constexpr std::int64_t kSecondsPerHour = 3600;

struct SeriesPoint {
  std::int64_t timestamp = 0;  // epoch seconds, UTC
  double value = 0.0;

  friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

struct ColumnSpec {
  std::string timestamp = "timestamp";
  std::string value = "value";
};

// One value per consecutive hour, starting at epoch hour `start_hour`.
struct HourlySeries {
  std::int64_t start_hour = 0;
  std::vector<double> values;

  friend bool operator==(const HourlySeries&, const HourlySeries&) = default;
};

// Aligned price ($/kWh), renewable generation (kW) and background load (kW).
struct DataWindow {
  HourlySeries price;
  HourlySeries renewable;
  HourlySeries background;
  int days = 0;

  std::int64_t start_hour() const { return price.start_hour; }
  std::size_t hours() const { return static_cast<std::size_t>(days) * kHoursPerDay; }

  // Throws kInvalidArgument unless all three series share a start hour and
  // hold exactly days * 24 non-negative values.
  void validate() const;

  friend bool operator==(const DataWindow&, const DataWindow&) = default;
};

// Accepts integer epoch seconds or ISO-8601 ("2021-05-01T00:00:00Z",
// "2021-05-01 00:00", optional +HH:MM offset). Throws kInvalidArgument.
std::int64_t parse_timestamp(std::string_view text);

std::vector<SeriesPoint> parse_csv_text(std::string_view text, const ColumnSpec& columns = {});
std::vector<SeriesPoint> parse_csv(const std::filesystem::path& path, const ColumnSpec& columns = {});
void write_csv(const std::filesystem::path& path, std::span<const SeriesPoint> points,
               const ColumnSpec& columns = {});

// Mean of the samples inside each hour. An hour without samples between the
// first and last sample throws GapInSeries.
HourlySeries hourly_average(std::span<const SeriesPoint> points);

// Intersects the three series and truncates to whole days starting at the
// first common hour. Throws kInsufficientData when less than a day overlaps.
DataWindow align_window(const HourlySeries& price, const HourlySeries& renewable,
                        const HourlySeries& background);

// Seeded synthetic stand-in for the price / household datasets.
DataWindow synthesize(std::uint64_t seed, int days);

DataWindow slice_window(const DataWindow& window, int day_index);

nlohmann::json window_to_json(const DataWindow& window);
DataWindow window_from_json(const nlohmann::json& j);
void save_window(const std::filesystem::path& path, const DataWindow& window);
DataWindow load_window(const std::filesystem::path& path);

}  // namespace prefinfer
