#include "replacement_checker.hpp"

#include <functional>
#include <set>

namespace oracle {

bool witness_valid(const thetajoin::JobCandidate& c, const std::vector<const thetajoin::JobCandidate*>& witness) {
  if (witness.empty()) return false;
  std::set<int> covered;
  double max_w = witness.front()->w;
  std::uint64_t total_s = 0;
  for (const auto* e : witness) {
    covered.insert(e->coverage.begin(), e->coverage.end());
    max_w = std::max(max_w, e->w);
    total_s += e->s;
  }
  for (int id : c.coverage)
    if (!covered.count(id)) return false;
  return c.w > max_w && c.s >= total_s;
}

bool witness_exists(const std::vector<thetajoin::JobCandidate>& all, std::size_t i, std::size_t max_size) {
  std::vector<std::size_t> usable;
  for (std::size_t j = 0; j < all.size(); ++j)
    if (j != i && all[j].w < all[i].w && all[j].s <= all[i].s) usable.push_back(j);
  std::vector<const thetajoin::JobCandidate*> pick;
  std::function<bool(std::size_t)> go = [&](std::size_t from) {
    if (!pick.empty() && witness_valid(all[i], pick)) return true;
    if (pick.size() == max_size) return false;
    for (std::size_t k = from; k < usable.size(); ++k) {
      pick.push_back(&all[usable[k]]);
      if (go(k + 1)) return true;
      pick.pop_back();
    }
    return false;
  };
  return go(0);
}

}  // namespace oracle
