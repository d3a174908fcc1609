#include "rsched/model/translate.hpp"

namespace rsched::model {

opt::Sense to_opt(RowSense s) {
    switch (s) {
        case RowSense::LE: return opt::Sense::LE;
        case RowSense::GE: return opt::Sense::GE;
        case RowSense::EQ: return opt::Sense::EQ;
    }
    return opt::Sense::LE;
}

opt::LpProblem to_lp(const ModelBuilder& mb, const std::vector<Term>& objective,
                     double offset) {
    opt::LpProblem p;
    for (const Variable& v : mb.variables())
        p.add_col(0.0, v.lb, v.ub, v.kind == VarKind::Binary, v.name);
    for (const Term& t : objective) p.obj[std::size_t(t.var)] += t.coef;
    p.obj_offset = offset;
    std::vector<std::pair<int, double>> terms;
    for (const Row& r : mb.rows()) {
        terms.clear();
        for (const Term& t : r.terms) terms.emplace_back(t.var, t.coef);
        p.add_row(to_opt(r.sense), r.rhs, terms, r.name);
    }
    return p;
}

opt::LpProblem to_lp(const ModelBuilder& mb) {
    return to_lp(mb, mb.objective(), mb.objective_offset());
}

}  // namespace rsched::model
