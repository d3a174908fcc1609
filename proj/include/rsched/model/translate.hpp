#pragma once

#include <vector>

#include "rsched/model/builder.hpp"
#include "rsched/opt/lp_model.hpp"

namespace rsched::model {

// Direct translation of the symbolic model into a solvable MILP, columns
// and rows in registration order.  The two-argument form substitutes an
// explicit objective (used for lexicographic passes and layer tests).
opt::LpProblem to_lp(const ModelBuilder& mb, const std::vector<Term>& objective,
                     double offset = 0.0);
opt::LpProblem to_lp(const ModelBuilder& mb);

opt::Sense to_opt(RowSense s);

}  // namespace rsched::model
