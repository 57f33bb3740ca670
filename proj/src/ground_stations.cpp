#include "satfl/ground_stations.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace satfl {

namespace {
constexpr std::array<int, 6> kStationCounts{1, 2, 3, 5, 10, 13};
}

const std::vector<GroundStation>& default_station_catalog() {
  static const std::vector<GroundStation> catalog{
      {"Sioux Falls", 43.55, -96.72},  {"Sanya", 18.25, 109.5},
      {"Johannesburg", -26.2, 28.03},  {"Cordoba", -31.4, -64.18},
      {"Tromso", 69.65, 18.95},        {"Kashi", 39.1, 77.2},
      {"Beijing", 39.9, 116.4},        {"Neustrelitz", 53.1, 13.1},
      {"Parepare", -2.99, 119.8},      {"Alice Springs", -25.1, 133.9},
      {"Fairbanks", 64.8, -147.7},     {"Prince Albert", 53.2, -105.7},
      {"Shadnagar", 17.4, 78.5},
  };
  return catalog;
}

std::span<const int> valid_station_counts() { return kStationCounts; }

bool is_valid_station_count(int n) {
  return std::find(kStationCounts.begin(), kStationCounts.end(), n) != kStationCounts.end();
}

std::vector<GroundStation> station_subset(const std::vector<GroundStation>& catalog, int n) {
  if (!is_valid_station_count(n))
    throw std::invalid_argument("station count " + std::to_string(n) +
                                " not in {1,2,3,5,10,13}");
  if (static_cast<size_t>(n) > catalog.size())
    throw std::invalid_argument("station catalog has only " + std::to_string(catalog.size()) +
                                " entries");
  return {catalog.begin(), catalog.begin() + n};
}

std::vector<GroundStation> load_station_catalog(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open station catalog " + path);
  std::vector<GroundStation> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 || line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string name, lat, lon;
    if (!std::getline(ss, name, ',') || !std::getline(ss, lat, ',') || !std::getline(ss, lon))
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected name,lat,lon");
    GroundStation gs;
    gs.name = name;
    try {
      gs.lat_deg = std::stod(lat);
      gs.lon_deg = std::stod(lon);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad coordinate");
    }
    gs.validate();
    out.push_back(gs);
  }
  return out;
}

std::string station_key(const std::string& name) {
  std::string key;
  for (char c : name)
    if (!std::isspace(static_cast<unsigned char>(c))) key += c;
  return key;
}

}  // namespace satfl
