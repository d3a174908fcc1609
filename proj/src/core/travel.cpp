#include "rsched/core/travel.hpp"

#include <cmath>

namespace rsched::core {

double travel_minutes(const Site& a, const Site& b, double speed_kmh) {
    return 0.12 * std::hypot(a.x - b.x, a.y - b.y) / speed_kmh;
}

std::vector<std::vector<double>> build_travel_matrix(
    const std::vector<Site>& sites, double speed_kmh) {
    const std::size_t n = sites.size();
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            m[i][j] = m[j][i] = travel_minutes(sites[i], sites[j], speed_kmh);
    return m;
}

}  // namespace rsched::core
