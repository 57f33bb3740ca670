#pragma once

#include <span>
#include <string>
#include <vector>

#include "satfl/orbital.hpp"

namespace satfl {

// The 13-site network, ordered so that the first n entries form the
// n-station configuration for every n in valid_station_counts().
const std::vector<GroundStation>& default_station_catalog();

std::span<const int> valid_station_counts();
bool is_valid_station_count(int n);

// First n stations of the catalog; throws for counts outside {1,2,3,5,10,13}.
std::vector<GroundStation> station_subset(const std::vector<GroundStation>& catalog, int n);

// Rows of `name,lat_deg,lon_deg` with a header line.
std::vector<GroundStation> load_station_catalog(const std::string& path);

// Station name with whitespace removed; used as the CSV counterpart key.
std::string station_key(const std::string& name);

}  // namespace satfl
