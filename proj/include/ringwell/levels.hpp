#pragma once

#include <map>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ringwell::detail {

// Best-first enumeration of the `count` lowest-energy ways to distribute a
// fixed number of bosons over single-particle levels sorted by ascending
// energy. Ties break on the occupation vector, compared lexicographically.
// Successors move one boson up one level, which never lowers the energy, so
// popping the heap in order yields the global k smallest.
inline std::vector<std::pair<double, std::vector<int>>> k_smallest_fixed_total(
    const std::vector<double>& level_energy, int total, int count) {
  const int nlev = static_cast<int>(level_energy.size());
  if (nlev == 0) throw std::invalid_argument("k_smallest_fixed_total: no levels");
  for (int i = 1; i < nlev; ++i)
    if (level_energy[i] < level_energy[i - 1])
      throw std::invalid_argument("k_smallest_fixed_total: energies not ascending");
  using State = std::pair<double, std::vector<int>>;
  std::priority_queue<State, std::vector<State>, std::greater<State>> heap;
  std::map<std::vector<int>, bool> seen;
  std::vector<int> ground(nlev, 0);
  ground[0] = total;
  heap.push({level_energy[0] * total, ground});
  seen[ground] = true;
  std::vector<State> out;
  while (!heap.empty() && static_cast<int>(out.size()) < count) {
    auto [energy, occ] = heap.top();
    heap.pop();
    out.push_back({energy, occ});
    for (int i = 0; i + 1 < nlev; ++i) {
      if (occ[i] == 0) continue;
      std::vector<int> next = occ;
      next[i] -= 1;
      next[i + 1] += 1;
      if (seen.emplace(next, true).second)
        heap.push({energy + level_energy[i + 1] - level_energy[i], std::move(next)});
    }
  }
  return out;
}

// Same idea for quasiparticle quanta: occupations are unbounded and every
// quantum has positive energy, so adding one strictly increases the total.
inline std::vector<std::pair<double, std::vector<int>>> k_smallest_unbounded(
    const std::vector<double>& quantum_energy, double base_energy, int count) {
  const int nmode = static_cast<int>(quantum_energy.size());
  for (double e : quantum_energy)
    if (!(e > 0.0))
      throw std::invalid_argument("k_smallest_unbounded: quanta must have positive energy");
  using State = std::pair<double, std::vector<int>>;
  std::priority_queue<State, std::vector<State>, std::greater<State>> heap;
  std::map<std::vector<int>, bool> seen;
  std::vector<int> ground(nmode, 0);
  heap.push({base_energy, ground});
  seen[ground] = true;
  std::vector<State> out;
  while (!heap.empty() && static_cast<int>(out.size()) < count) {
    auto [energy, occ] = heap.top();
    heap.pop();
    out.push_back({energy, occ});
    for (int i = 0; i < nmode; ++i) {
      std::vector<int> next = occ;
      next[i] += 1;
      if (seen.emplace(next, true).second)
        heap.push({energy + quantum_energy[i], std::move(next)});
    }
  }
  return out;
}

}  // namespace ringwell::detail
