#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

// Problem instance: physical network, crews, cyber network, uncertainty,
// horizon and costs.  Loaded from a JSON document (see docs/schema.md),
// validated, and converted to canonical units: kW, kvar, minutes, volts,
// meters.  Immutable after load.

namespace rsched::core {

class InstanceError : public std::runtime_error {
  public:
    InstanceError(const std::string& path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(path) {}
    const std::string& path() const { return path_; }

  private:
    std::string path_;
};

struct Node {
    std::string id;
    double x = 0.0, y = 0.0;          // meters
    std::vector<double> load_kw;      // per slot
    std::vector<double> qload_kvar;   // per slot
    bool critical = false;
    double penalty_per_kwh = 0.0;     // $/kWh of shed energy
    double vmin = 0.0, vmax = 0.0;    // volts
};

enum class SwitchKind { None, MS, RCS };

struct Line {
    std::string id;
    int from = -1, to = -1;           // node indices
    double r_ohm = 0.0, x_ohm = 0.0;
    double p_cap_kw = 0.0, q_cap_kvar = 0.0;
    SwitchKind sw = SwitchKind::None;
    std::string switch_id;            // empty unless sw != None
    bool damaged = false;
};

enum class SourceKind { Substation, GT, RES };

struct Source {
    std::string id;
    SourceKind kind = SourceKind::Substation;
    int node = -1;
    std::vector<double> p_max_kw;     // per slot (RES: forecast trajectory)
    std::vector<double> q_max_kvar;   // per slot
    double ramp_up_kw = 0.0;          // per slot, magnitude (GT only)
    double ramp_down_kw = 0.0;        // per slot, magnitude (GT only)
    double reserve_factor = 1.0;      // usable share of the ramp rate, (0,1]
    double freq_response_rate = 1.0;  // fraction of rated power available to
                                      // pick up load within one slot
    // uncertainty (RES only)
    double max_error = 0.0;           // omega in [0,1]
    double budget = 0.0;              // per-RES deviation budget
};

struct RepairCrew {
    std::string id;
    double depot_x = 0.0, depot_y = 0.0;
    std::map<std::string, double> repair_min;  // line id -> duration
};

struct OperatingCrew {
    std::string id;
    double depot_x = 0.0, depot_y = 0.0;
    std::map<std::string, double> manual_min;  // switch id -> duration
};

enum class RouterRole { ControlCentre, RcsFtu, Gt, Res, Substation, Relay };

struct Router {
    std::string id;
    RouterRole role = RouterRole::Relay;
    double x = 0.0, y = 0.0;
    double rated_kw = 0.0;
    double ups_min = 0.0;
    int power_node = -1;              // node supplying this router
    int rcs_line = -1;                // line whose RCS this FTU drives
    // candidate link sequences, each a router-index path
    // [this router, ..., control centre]
    std::vector<std::vector<int>> links;
};

struct Horizon {
    double slot_min = 0.0;
    int slots = 0;
    double t_max_min = 0.0;
    double epsilon_min = 0.0;
};

struct Instance {
    // network
    std::vector<Node> nodes;
    std::vector<Line> lines;
    std::vector<Source> sources;
    double nominal_voltage_v = 0.0;
    double power_factor = 0.95;
    // node indices (sorted) whose first-slot load counts as already served
    // when the frequency-response ramp limit is evaluated at the first slot
    std::vector<int> initially_energized_nodes;

    // crews
    std::vector<RepairCrew> repair_crews;
    std::vector<OperatingCrew> operating_crews;
    double travel_speed_kmh = 0.0;
    std::map<std::string, double> remote_min;  // switch id -> RCS op duration

    // cyber
    std::vector<Router> routers;
    double comm_radius_m = 0.0;
    int hop_limit = 0;
    int control_centre = -1;          // router index
    int blackout_until_slot = -1;     // routers (except centre) forced dead
                                      // for slots <= this value; -1 disables

    Horizon horizon;

    // uncertainty discretization (bits per deviation variable)
    int sigma_bits = 6;

    // derived index sets (line indices)
    std::vector<int> fault_lines;     // damaged lines
    std::vector<int> ms_lines;        // manual-switch lines
    std::vector<int> rcs_lines;       // remote-switch lines

    std::vector<std::string> warnings;

    // lookups
    int node_index(const std::string& id) const;
    int line_index(const std::string& id) const;
    int switch_line(const std::string& switch_id) const;  // -1 if unknown
    const Line& line_of_switch(const std::string& switch_id) const;

  private:
    friend Instance load_instance(const std::string&);
    std::map<std::string, int> node_idx_, line_idx_, switch_idx_;
};

// Parse, validate, and canonicalize a JSON instance document.  Throws
// InstanceError with the path of the offending field.
Instance load_instance(const std::string& json_text);
Instance load_instance_file(const std::string& path);

}  // namespace rsched::core
