#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace satfl {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream seed for (run seed, tag...) tuples, e.g. (seed, client, round).
inline std::uint64_t derive_seed(std::uint64_t run_seed, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = splitmix64(run_seed);
  for (auto t : tags) h = splitmix64(h ^ splitmix64(t + 0x632be59bd9b4e019ULL));
  return h;
}

// Fisher-Yates.
template <typename T>
void shuffle_in_place(std::span<T> items, std::mt19937_64& rng) {
  for (size_t i = items.size(); i > 1; --i) {
    std::uniform_int_distribution<size_t> pick(0, i - 1);
    std::swap(items[i - 1], items[pick(rng)]);
  }
}

}  // namespace satfl
