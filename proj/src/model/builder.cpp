#include "rsched/model/builder.hpp"

#include <algorithm>
#include <cmath>

namespace rsched::model {

namespace {

[[noreturn]] void bail(const std::string& what) { throw ModelError(what); }

}  // namespace

const char* to_string(Stage s) {
    switch (s) {
        case Stage::First: return "first";
        case Stage::Second: return "second";
        case Stage::Uncertainty: return "uncertainty";
    }
    return "?";
}

const char* to_string(Family f) {
    switch (f) {
        case Family::Scheduling: return "scheduling";
        case Family::Recourse: return "recourse";
        case Family::Scenario: return "scenario";
    }
    return "?";
}

void ModelBuilder::mutable_or_throw() const {
    if (finalized_) bail("model is finalized; no further mutation allowed");
}

int ModelBuilder::add_variable(const std::string& name, Stage stage,
                               VarKind kind, double lb, double ub) {
    mutable_or_throw();
    if (name.empty()) bail("variable name must not be empty");
    if (!var_index_.emplace(name, num_variables()).second)
        bail("duplicate variable name: " + name);
    if (std::isnan(lb) || std::isnan(ub) || lb > ub)
        bail("inconsistent bounds on variable " + name);
    if (kind == VarKind::Binary &&
        (lb < 0.0 || ub > 1.0 ||
         lb != std::floor(lb) || ub != std::floor(ub)))
        bail("binary variable " + name + " needs integer bounds within [0,1]");
    vars_.push_back({name, stage, kind, lb, ub});
    return num_variables() - 1;
}

void ModelBuilder::fix(int v, double value) {
    mutable_or_throw();
    Variable& x = vars_.at(std::size_t(v));
    if (value < x.lb || value > x.ub)
        bail("fixing " + x.name + " outside its bounds");
    if (x.kind == VarKind::Binary && value != 0.0 && value != 1.0)
        bail("fixing binary " + x.name + " to a fractional value");
    x.lb = x.ub = value;
}

int ModelBuilder::add_row(const std::string& name, RowSense sense, double rhs,
                          std::vector<Term> terms) {
    mutable_or_throw();
    if (name.empty()) bail("row name must not be empty");
    if (!row_index_.emplace(name, num_rows()).second)
        bail("duplicate row name: " + name);
    if (!std::isfinite(rhs)) bail("non-finite right-hand side in row " + name);
    for (const Term& t : terms) {
        if (t.var < 0 || t.var >= num_variables())
            bail("row " + name + " references an unregistered variable");
        if (!std::isfinite(t.coef))
            bail("non-finite coefficient in row " + name);
    }
    std::sort(terms.begin(), terms.end(),
              [](const Term& a, const Term& b) { return a.var < b.var; });
    std::vector<Term> merged;
    merged.reserve(terms.size());
    for (const Term& t : terms) {
        if (!merged.empty() && merged.back().var == t.var)
            merged.back().coef += t.coef;
        else
            merged.push_back(t);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const Term& t) { return t.coef == 0.0; }),
                 merged.end());
    rows_.push_back({name, sense, rhs, std::move(merged), Family::Scheduling});
    return num_rows() - 1;
}

void ModelBuilder::add_objective(int v, double coef) {
    mutable_or_throw();
    if (v < 0 || v >= num_variables())
        bail("objective references an unregistered variable");
    if (!std::isfinite(coef)) bail("non-finite objective coefficient");
    objective_.push_back({v, coef});
}

int ModelBuilder::variable(const std::string& name) const {
    const auto it = var_index_.find(name);
    return it == var_index_.end() ? -1 : it->second;
}

int ModelBuilder::require(const std::string& name) const {
    const int v = variable(name);
    if (v < 0) bail("unknown variable: " + name);
    return v;
}

void ModelBuilder::finalize() {
    mutable_or_throw();

    // Coalesce duplicate objective entries into canonical order.
    std::sort(objective_.begin(), objective_.end(),
              [](const Term& a, const Term& b) { return a.var < b.var; });
    std::vector<Term> obj;
    obj.reserve(objective_.size());
    for (const Term& t : objective_) {
        if (!obj.empty() && obj.back().var == t.var)
            obj.back().coef += t.coef;
        else
            obj.push_back(t);
    }
    obj.erase(std::remove_if(obj.begin(), obj.end(),
                             [](const Term& t) { return t.coef == 0.0; }),
              obj.end());
    objective_ = std::move(obj);

    for (const Term& t : objective_)
        if (vars_[std::size_t(t.var)].stage != Stage::Second)
            bail("objective cost on non-operational variable " +
                 vars_[std::size_t(t.var)].name);

    std::vector<char> second_used(vars_.size(), 0);
    std::vector<char> unc_used(vars_.size(), 0);
    for (Row& r : rows_) {
        bool has_first = false, has_second = false, has_unc = false;
        for (const Term& t : r.terms) {
            switch (vars_[std::size_t(t.var)].stage) {
                case Stage::First: has_first = true; break;
                case Stage::Second: has_second = true; break;
                case Stage::Uncertainty: has_unc = true; break;
            }
        }
        if (has_unc) {
            if (has_first)
                bail("row " + r.name +
                     " mixes uncertainty and first-stage variables");
            r.family = Family::Scenario;
        } else if (has_second) {
            r.family = Family::Recourse;
        } else {
            r.family = Family::Scheduling;
        }
        for (const Term& t : r.terms) {
            if (r.family != Family::Scheduling)
                second_used[std::size_t(t.var)] = 1;
            if (r.family == Family::Scenario)
                unc_used[std::size_t(t.var)] = 1;
        }
    }
    for (std::size_t v = 0; v < vars_.size(); ++v) {
        if (vars_[v].stage == Stage::Second && !second_used[v] &&
            vars_[v].lb != vars_[v].ub)
            bail("operational variable " + vars_[v].name +
                 " appears in no operational row (stage contradiction)");
        if (vars_[v].stage == Stage::Uncertainty && !unc_used[v] &&
            vars_[v].lb != vars_[v].ub)
            bail("uncertainty variable " + vars_[v].name +
                 " appears in no scenario row");
    }

    finalized_ = true;
}

int ModelBuilder::count_rows(Family f) const {
    int n = 0;
    for (const Row& r : rows_) n += (r.family == f);
    return n;
}

int ModelBuilder::count_variables(Stage s) const {
    int n = 0;
    for (const Variable& v : vars_) n += (v.stage == s);
    return n;
}

}  // namespace rsched::model
