#include "pqs/record.hpp"

#include <algorithm>

namespace pqs {

int TruthTrajectory::n_at(double t) const {
    auto it = std::upper_bound(jump_times.begin(), jump_times.end(), t);
    if (it == jump_times.begin()) return initial_n;
    const auto idx = static_cast<size_t>(it - jump_times.begin()) - 1;
    return photon_numbers[idx];
}

} // namespace pqs
