#pragma once

#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

// Symbolic MILP container for the restoration model.  Emitters register
// named variables and rows here; the robust engine later splits the content
// by stage/family into master and subproblem matrices.  Construction order
// is the canonical order, so identical inputs always produce byte-identical
// models.

namespace rsched::model {

// Which decision layer a variable belongs to.  First: the schedule itself
// (routing, timing, status timelines, switch states, communication
// availability, root flags).  Second: the operational response once the
// schedule is fixed (powers, voltages, flows, shedding).  Uncertainty:
// adversarial deviation variables.
enum class Stage : unsigned char { First, Second, Uncertainty };

enum class VarKind : unsigned char { Continuous, Binary };

enum class RowSense : unsigned char { LE, GE, EQ };

// Row classification, computed from variable content when the model is
// finalized: a row touching an uncertainty variable is Scenario (and must
// not touch first-stage variables); otherwise a row touching a second-stage
// variable is Recourse; otherwise the row constrains the schedule alone.
enum class Family : unsigned char { Scheduling, Recourse, Scenario };

const char* to_string(Stage s);
const char* to_string(Family f);

struct Variable {
    std::string name;
    Stage stage = Stage::First;
    VarKind kind = VarKind::Continuous;
    double lb = 0.0;
    double ub = 0.0;
};

struct Term {
    int var = -1;
    double coef = 0.0;
};

struct Row {
    std::string name;
    RowSense sense = RowSense::LE;
    double rhs = 0.0;
    std::vector<Term> terms;  // sorted by variable id, duplicates summed
    Family family = Family::Scheduling;  // set by finalize()
};

class ModelError : public std::runtime_error {
  public:
    explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

class ModelBuilder {
  public:
    // ---- construction ----
    int add_variable(const std::string& name, Stage stage, VarKind kind,
                     double lb, double ub);
    int add_binary(const std::string& name, Stage stage) {
        return add_variable(name, stage, VarKind::Binary, 0.0, 1.0);
    }
    int add_continuous(const std::string& name, Stage stage, double lb,
                       double ub) {
        return add_variable(name, stage, VarKind::Continuous, lb, ub);
    }
    // Pin a variable to a constant (tightens both bounds).
    void fix(int var, double value);

    int add_row(const std::string& name, RowSense sense, double rhs,
                std::vector<Term> terms);

    // Objective is accumulated; only second-stage variables may carry cost
    // (the schedule itself is costless; checked by finalize()).
    void add_objective(int var, double coef);
    void add_objective_offset(double value) { obj_offset_ += value; }

    // ---- queries ----
    // Index of a variable by exact name; -1 when absent.
    int variable(const std::string& name) const;
    // Same, but throws ModelError when absent (for extractors).
    int require(const std::string& name) const;
    const Variable& var(int v) const { return vars_.at(std::size_t(v)); }
    const std::vector<Variable>& variables() const { return vars_; }
    const std::vector<Row>& rows() const { return rows_; }
    const std::vector<Term>& objective() const { return objective_; }
    double objective_offset() const { return obj_offset_; }
    int num_variables() const { return static_cast<int>(vars_.size()); }
    int num_rows() const { return static_cast<int>(rows_.size()); }

    // ---- finalization ----
    // Computes row families and enforces the structural contract:
    //   * scenario rows never touch first-stage variables;
    //   * every second-stage variable appears in at least one recourse or
    //     scenario row (otherwise its stage tag contradicts its use);
    //   * every uncertainty variable appears in at least one scenario row;
    //   * objective cost sits on second-stage variables only.
    // After finalize() the model is frozen; further mutation throws.
    void finalize();
    bool finalized() const { return finalized_; }

    int count_rows(Family f) const;
    int count_variables(Stage s) const;

  private:
    void mutable_or_throw() const;

    std::vector<Variable> vars_;
    std::vector<Row> rows_;
    std::vector<Term> objective_;
    double obj_offset_ = 0.0;
    std::unordered_map<std::string, int> var_index_;
    std::unordered_map<std::string, int> row_index_;
    bool finalized_ = false;
};

}  // namespace rsched::model
