#include "pvboost/pareto.hpp"

#include <algorithm>
#include <limits>

namespace pvboost {

bool dominates(ObjectivePair u, ObjectivePair v) {
    return (u.f1 > v.f1 && u.f2 > v.f2) || (u.f1 > v.f1 && u.f2 == v.f2) ||
           (u.f1 == v.f1 && u.f2 > v.f2);
}

std::vector<FrontPoint> pareto_filter(std::vector<FrontPoint> points) {
    auto by_f1_desc = [](const FrontPoint& a, const FrontPoint& b) {
        if (a.f1 != b.f1) return a.f1 > b.f1;
        if (a.f2 != b.f2) return a.f2 > b.f2;
        return a.id < b.id;
    };
    std::sort(points.begin(), points.end(), by_f1_desc);

    std::vector<FrontPoint> kept;
    double best_f2 = -std::numeric_limits<double>::infinity();
    std::size_t i = 0;
    while (i < points.size()) {
        // One group of equal f1, in descending f2 order. Only the group's
        // top f2 can survive (lower f2 is dominated within the group);
        // exact duplicates of the top do not dominate each other.
        std::size_t j = i;
        const double f1 = points[i].f1;
        const double top_f2 = points[i].f2;
        while (j < points.size() && points[j].f1 == f1) ++j;
        if (top_f2 > best_f2) {
            for (std::size_t k = i; k < j && points[k].f2 == top_f2; ++k)
                kept.push_back(points[k]);
            best_f2 = top_f2;
        }
        i = j;
    }

    std::sort(kept.begin(), kept.end(),
              [](const FrontPoint& a, const FrontPoint& b) {
                  if (a.f1 != b.f1) return a.f1 < b.f1;
                  if (a.f2 != b.f2) return a.f2 > b.f2;
                  return a.id < b.id;
              });
    return kept;
}

}  // namespace pvboost
