#include "rsched/core/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "json.hpp"

namespace rsched::core {

namespace {

using nlohmann::json;

struct Units {
    double power = 1.0;     // field value * power -> kW
    double time = 1.0;      // -> minutes
    double distance = 1.0;  // -> meters
};

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw InstanceError(path, what);
}

const json& member(const json& o, const std::string& path,
                   const std::string& key) {
    if (!o.is_object()) fail(path, "expected an object");
    auto it = o.find(key);
    if (it == o.end()) fail(path + "." + key, "missing required field");
    return *it;
}

const json* opt_member(const json& o, const std::string& key) {
    if (!o.is_object()) return nullptr;
    auto it = o.find(key);
    return it == o.end() ? nullptr : &*it;
}

void check_fields(const json& o, const std::string& path,
                  std::initializer_list<const char*> allowed) {
    if (!o.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : o.items()) {
        (void)value;
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
                return key == a;
            }) == allowed.end())
            fail(path + "." + key, "unknown field");
    }
}

double num(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

double pos_num(const json& v, const std::string& path) {
    const double d = num(v, path);
    if (!(d > 0.0)) fail(path, "must be > 0");
    return d;
}

double nonneg_num(const json& v, const std::string& path) {
    const double d = num(v, path);
    if (!(d >= 0.0)) fail(path, "must be >= 0");
    return d;
}

std::string str(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
}

// scalar -> constant series, array -> per-slot series of length `slots`
std::vector<double> series(const json& v, const std::string& path, int slots,
                           double unit) {
    std::vector<double> out;
    if (v.is_number()) {
        out.assign(static_cast<std::size_t>(slots),
                   nonneg_num(v, path) * unit);
    } else if (v.is_array()) {
        if (static_cast<int>(v.size()) != slots)
            fail(path, "per-slot array must have exactly " +
                           std::to_string(slots) + " entries");
        for (std::size_t k = 0; k < v.size(); ++k)
            out.push_back(
                nonneg_num(v[k], path + "[" + std::to_string(k) + "]") * unit);
    } else {
        fail(path, "expected a number or a per-slot array");
    }
    return out;
}

double travel_minutes(double ax, double ay, double bx, double by,
                      double speed_kmh) {
    const double d = std::hypot(ax - bx, ay - by);
    return 0.12 * d / speed_kmh;  // 2*d[m] / (speed[km/h] * 1000/60)
}

struct SiteTask {
    double x, y;
    double* duration;  // owned by the instance maps; may be bumped
};

// The slot-boundary separation rule: no candidate completion time generated
// by short task chains may fall within epsilon of a slot boundary, otherwise
// the strict-inequality timeline constraints become ill-posed.  Offending
// durations are perturbed by +2*epsilon (with a warning).
void enforce_boundary_separation(Instance& ins) {
    const double eps = ins.horizon.epsilon_min;
    const double dt = ins.horizon.slot_min;

    auto near_boundary = [&](double t) {
        const double r = std::fabs(t - std::round(t / dt) * dt);
        return r < eps;
    };

    struct CrewTasks {
        double depot_x, depot_y;
        std::vector<SiteTask> tasks;
    };
    std::vector<CrewTasks> crews;
    for (auto& rc : ins.repair_crews) {
        CrewTasks ct{rc.depot_x, rc.depot_y, {}};
        for (const int li : ins.fault_lines) {
            const Line& l = ins.lines[li];
            auto it = rc.repair_min.find(l.id);
            if (it == rc.repair_min.end()) continue;
            const Node& a = ins.nodes[l.from];
            const Node& b = ins.nodes[l.to];
            ct.tasks.push_back(
                {(a.x + b.x) / 2, (a.y + b.y) / 2, &it->second});
        }
        crews.push_back(std::move(ct));
    }
    for (auto& oc : ins.operating_crews) {
        CrewTasks ct{oc.depot_x, oc.depot_y, {}};
        for (auto& [sw, dur] : oc.manual_min) {
            const Line& l = ins.line_of_switch(sw);
            const Node& a = ins.nodes[l.from];
            const Node& b = ins.nodes[l.to];
            ct.tasks.push_back({(a.x + b.x) / 2, (a.y + b.y) / 2, &dur});
        }
        crews.push_back(std::move(ct));
    }

    for (int round = 0; round < 10; ++round) {
        double* bump = nullptr;
        // remote operations start on slot boundaries
        for (auto& [sw, dur] : ins.remote_min) {
            (void)sw;
            if (near_boundary(dur)) {  // t*dt + dur near boundary <=> dur near
                bump = &dur;
                break;
            }
        }
        // travel/operate chains of length <= 3
        for (const auto& ct : crews) {
            if (bump) break;
            const int k = static_cast<int>(ct.tasks.size());
            for (int i = 0; i < k && !bump; ++i) {
                const SiteTask& a = ct.tasks[i];
                const double ta = travel_minutes(ct.depot_x, ct.depot_y, a.x,
                                                 a.y, ins.travel_speed_kmh) +
                                  *a.duration;
                if (near_boundary(ta)) {
                    bump = a.duration;
                    break;
                }
                for (int j = 0; j < k && !bump; ++j) {
                    if (j == i) continue;
                    const SiteTask& b = ct.tasks[j];
                    const double tb =
                        ta +
                        travel_minutes(a.x, a.y, b.x, b.y,
                                       ins.travel_speed_kmh) +
                        *b.duration;
                    if (near_boundary(tb)) {
                        bump = b.duration;
                        break;
                    }
                    for (int l = 0; l < k; ++l) {
                        if (l == i || l == j) continue;
                        const SiteTask& c = ct.tasks[l];
                        const double tc =
                            tb +
                            travel_minutes(b.x, b.y, c.x, c.y,
                                           ins.travel_speed_kmh) +
                            *c.duration;
                        if (near_boundary(tc)) {
                            bump = c.duration;
                            break;
                        }
                    }
                }
            }
        }
        if (!bump) return;
        *bump += 2 * eps;
        ins.warnings.push_back(
            "a task completion time fell within epsilon of a slot boundary; "
            "its duration was perturbed by +2*epsilon");
    }
    fail("horizon.epsilon_min",
         "could not separate task completion times from slot boundaries "
         "after 10 perturbation rounds");
}

// Candidate cyber link derivation: bounded simple-path search from each
// router to the control centre over the within-radius adjacency, ordered by
// (hop count, total length, lexicographic ids), keeping the best 3.
void derive_links(Instance& ins) {
    const int R = static_cast<int>(ins.routers.size());
    const int cc = ins.control_centre;
    std::vector<std::vector<int>> adj(R);
    for (int a = 0; a < R; ++a)
        for (int b = 0; b < R; ++b) {
            if (a == b) continue;
            const double d = std::hypot(ins.routers[a].x - ins.routers[b].x,
                                        ins.routers[a].y - ins.routers[b].y);
            if (d <= ins.comm_radius_m) adj[a].push_back(b);
        }

    struct Cand {
        int hops;
        double len;
        std::vector<int> path;
    };
    for (int rstart = 0; rstart < R; ++rstart) {
        if (rstart == cc) continue;
        std::vector<Cand> cands;
        std::vector<int> path{rstart};
        std::vector<char> used(static_cast<std::size_t>(R), 0);
        used[rstart] = 1;
        std::function<void(int, double)> dfs = [&](int at, double len) {
            if (at == cc) {
                cands.push_back(
                    {static_cast<int>(path.size()) - 1, len, path});
                return;
            }
            if (static_cast<int>(path.size()) - 1 >= ins.hop_limit) return;
            for (const int nxt : adj[at]) {
                if (used[nxt]) continue;
                used[nxt] = 1;
                path.push_back(nxt);
                dfs(nxt, len + std::hypot(ins.routers[at].x -
                                              ins.routers[nxt].x,
                                          ins.routers[at].y -
                                              ins.routers[nxt].y));
                path.pop_back();
                used[nxt] = 0;
            }
        };
        dfs(rstart, 0.0);
        std::sort(cands.begin(), cands.end(),
                  [&](const Cand& a, const Cand& b) {
                      if (a.hops != b.hops) return a.hops < b.hops;
                      if (a.len != b.len) return a.len < b.len;
                      return a.path < b.path;
                  });
        Router& r = ins.routers[rstart];
        for (std::size_t k = 0; k < cands.size() && k < 3; ++k)
            r.links.push_back(cands[k].path);
    }
}

}  // namespace

int Instance::node_index(const std::string& id) const {
    auto it = node_idx_.find(id);
    return it == node_idx_.end() ? -1 : it->second;
}

int Instance::line_index(const std::string& id) const {
    auto it = line_idx_.find(id);
    return it == line_idx_.end() ? -1 : it->second;
}

int Instance::switch_line(const std::string& switch_id) const {
    auto it = switch_idx_.find(switch_id);
    return it == switch_idx_.end() ? -1 : it->second;
}

const Line& Instance::line_of_switch(const std::string& switch_id) const {
    const int li = switch_line(switch_id);
    if (li < 0) throw InstanceError("switch." + switch_id, "unknown switch");
    return lines[static_cast<std::size_t>(li)];
}

Instance load_instance(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail("$", std::string("not valid JSON: ") + e.what());
    }
    check_fields(doc, "$",
                 {"units", "network", "crews", "cyber", "uncertainty",
                  "horizon", "costs"});

    Units u;
    if (const json* uj = opt_member(doc, "units")) {
        check_fields(*uj, "units", {"power", "time", "distance"});
        if (const json* p = opt_member(*uj, "power")) {
            const std::string s = str(*p, "units.power");
            if (s == "kW") u.power = 1.0;
            else if (s == "MW") u.power = 1000.0;
            else fail("units.power", "expected \"kW\" or \"MW\"");
        }
        if (const json* p = opt_member(*uj, "time")) {
            const std::string s = str(*p, "units.time");
            if (s == "min") u.time = 1.0;
            else if (s == "h") u.time = 60.0;
            else fail("units.time", "expected \"min\" or \"h\"");
        }
        if (const json* p = opt_member(*uj, "distance")) {
            const std::string s = str(*p, "units.distance");
            if (s == "m") u.distance = 1.0;
            else if (s == "km") u.distance = 1000.0;
            else fail("units.distance", "expected \"m\" or \"km\"");
        }
    }

    Instance ins;

    // ---- horizon (needed first: series lengths depend on slot count) ----
    const json& hz = member(doc, "$", "horizon");
    check_fields(hz, "horizon",
                 {"slot_minutes", "slots", "t_max_min", "epsilon_min"});
    ins.horizon.slot_min =
        pos_num(member(hz, "horizon", "slot_minutes"), "horizon.slot_minutes") *
        u.time;
    const json& slots_j = member(hz, "horizon", "slots");
    if (!slots_j.is_number_integer() || slots_j.get<int>() < 1)
        fail("horizon.slots", "expected a positive integer");
    ins.horizon.slots = slots_j.get<int>();
    const double span = ins.horizon.slot_min * ins.horizon.slots;
    ins.horizon.t_max_min =
        opt_member(hz, "t_max_min")
            ? pos_num(*opt_member(hz, "t_max_min"), "horizon.t_max_min") *
                  u.time
            : 2.0 * span;
    if (ins.horizon.t_max_min < span)
        fail("horizon.t_max_min",
             "must cover the whole horizon (slots * slot_minutes)");
    ins.horizon.epsilon_min =
        opt_member(hz, "epsilon_min")
            ? pos_num(*opt_member(hz, "epsilon_min"), "horizon.epsilon_min") *
                  u.time
            : ins.horizon.slot_min * 1e-3;
    if (ins.horizon.epsilon_min >= ins.horizon.slot_min)
        fail("horizon.epsilon_min", "must be smaller than the slot length");
    const int T = ins.horizon.slots;

    // ---- costs (defaults applied to nodes below) ----
    double default_penalty = -1.0, critical_penalty = -1.0;
    if (const json* cj = opt_member(doc, "costs")) {
        check_fields(*cj, "costs",
                     {"default_penalty_per_kwh", "critical_penalty_per_kwh"});
        if (const json* p = opt_member(*cj, "default_penalty_per_kwh"))
            default_penalty = pos_num(*p, "costs.default_penalty_per_kwh");
        if (const json* p = opt_member(*cj, "critical_penalty_per_kwh"))
            critical_penalty = pos_num(*p, "costs.critical_penalty_per_kwh");
    }

    // ---- network ----
    const json& net = member(doc, "$", "network");
    check_fields(net, "network",
                 {"nominal_voltage_v", "voltage_min_v", "voltage_max_v",
                  "power_factor", "nodes", "lines", "sources",
                  "initially_energized_nodes"});
    ins.nominal_voltage_v = pos_num(member(net, "network", "nominal_voltage_v"),
                                    "network.nominal_voltage_v");
    const double vmin_net = pos_num(member(net, "network", "voltage_min_v"),
                                    "network.voltage_min_v");
    const double vmax_net = pos_num(member(net, "network", "voltage_max_v"),
                                    "network.voltage_max_v");
    if (vmin_net > vmax_net)
        fail("network.voltage_min_v", "exceeds voltage_max_v");
    if (const json* p = opt_member(net, "power_factor")) {
        ins.power_factor = num(*p, "network.power_factor");
        if (ins.power_factor <= 0.0 || ins.power_factor > 1.0)
            fail("network.power_factor", "must be in (0, 1]");
    }
    const double tan_phi =
        std::sqrt(1.0 - ins.power_factor * ins.power_factor) /
        ins.power_factor;

    const json& nodes_j = member(net, "network", "nodes");
    if (!nodes_j.is_array() || nodes_j.empty())
        fail("network.nodes", "expected a non-empty array");
    for (std::size_t k = 0; k < nodes_j.size(); ++k) {
        const std::string path = "network.nodes[" + std::to_string(k) + "]";
        const json& nj = nodes_j[k];
        check_fields(nj, path,
                     {"id", "x_m", "y_m", "load_kw", "reactive_load_kvar",
                      "critical", "penalty_per_kwh", "voltage_min_v",
                      "voltage_max_v"});
        Node n;
        n.id = str(member(nj, path, "id"), path + ".id");
        if (ins.node_idx_.count(n.id)) fail(path + ".id", "duplicate node id");
        n.x = num(member(nj, path, "x_m"), path + ".x_m") * u.distance;
        n.y = num(member(nj, path, "y_m"), path + ".y_m") * u.distance;
        n.load_kw = opt_member(nj, "load_kw")
                        ? series(*opt_member(nj, "load_kw"), path + ".load_kw",
                                 T, u.power)
                        : std::vector<double>(static_cast<std::size_t>(T), 0.0);
        n.qload_kvar =
            opt_member(nj, "reactive_load_kvar")
                ? series(*opt_member(nj, "reactive_load_kvar"),
                         path + ".reactive_load_kvar", T, u.power)
                : [&] {
                      std::vector<double> q = n.load_kw;
                      for (double& v : q) v *= tan_phi;
                      return q;
                  }();
        if (const json* p = opt_member(nj, "critical")) {
            if (!p->is_boolean()) fail(path + ".critical", "expected a bool");
            n.critical = p->get<bool>();
        }
        if (const json* p = opt_member(nj, "penalty_per_kwh"))
            n.penalty_per_kwh = pos_num(*p, path + ".penalty_per_kwh");
        else
            n.penalty_per_kwh = n.critical ? critical_penalty : default_penalty;
        const bool has_load =
            *std::max_element(n.load_kw.begin(), n.load_kw.end()) > 0.0;
        if (has_load && n.penalty_per_kwh <= 0.0)
            fail(path + ".penalty_per_kwh",
                 "node carries load but has no positive shedding penalty "
                 "(set it here or via the costs section)");
        n.vmin = opt_member(nj, "voltage_min_v")
                     ? pos_num(*opt_member(nj, "voltage_min_v"),
                               path + ".voltage_min_v")
                     : vmin_net;
        n.vmax = opt_member(nj, "voltage_max_v")
                     ? pos_num(*opt_member(nj, "voltage_max_v"),
                               path + ".voltage_max_v")
                     : vmax_net;
        if (n.vmin > n.vmax) fail(path + ".voltage_min_v", "exceeds max");
        ins.node_idx_[n.id] = static_cast<int>(ins.nodes.size());
        ins.nodes.push_back(std::move(n));
    }

    const json& lines_j = member(net, "network", "lines");
    if (!lines_j.is_array()) fail("network.lines", "expected an array");
    for (std::size_t k = 0; k < lines_j.size(); ++k) {
        const std::string path = "network.lines[" + std::to_string(k) + "]";
        const json& lj = lines_j[k];
        check_fields(lj, path,
                     {"id", "from", "to", "resistance_ohm", "reactance_ohm",
                      "capacity_kw", "capacity_kvar", "switch", "damaged"});
        Line l;
        l.id = str(member(lj, path, "id"), path + ".id");
        if (ins.line_idx_.count(l.id)) fail(path + ".id", "duplicate line id");
        const std::string from = str(member(lj, path, "from"), path + ".from");
        const std::string to = str(member(lj, path, "to"), path + ".to");
        l.from = ins.node_index(from);
        l.to = ins.node_index(to);
        if (l.from < 0) fail(path + ".from", "unknown node '" + from + "'");
        if (l.to < 0) fail(path + ".to", "unknown node '" + to + "'");
        if (l.from == l.to) fail(path + ".to", "line endpoints coincide");
        l.r_ohm = nonneg_num(member(lj, path, "resistance_ohm"),
                             path + ".resistance_ohm");
        l.x_ohm = nonneg_num(member(lj, path, "reactance_ohm"),
                             path + ".reactance_ohm");
        l.p_cap_kw = nonneg_num(member(lj, path, "capacity_kw"),
                                path + ".capacity_kw") *
                     u.power;
        l.q_cap_kvar = nonneg_num(member(lj, path, "capacity_kvar"),
                                  path + ".capacity_kvar") *
                       u.power;
        if (const json* p = opt_member(lj, "switch")) {
            check_fields(*p, path + ".switch", {"id", "kind"});
            l.switch_id =
                str(member(*p, path + ".switch", "id"), path + ".switch.id");
            const std::string kind = str(member(*p, path + ".switch", "kind"),
                                         path + ".switch.kind");
            if (kind == "MS") l.sw = SwitchKind::MS;
            else if (kind == "RCS") l.sw = SwitchKind::RCS;
            else fail(path + ".switch.kind", "expected \"MS\" or \"RCS\"");
            if (ins.switch_idx_.count(l.switch_id))
                fail(path + ".switch.id",
                     "switch already appears on another line");
            ins.switch_idx_[l.switch_id] = static_cast<int>(ins.lines.size());
        }
        if (const json* p = opt_member(lj, "damaged")) {
            if (!p->is_boolean()) fail(path + ".damaged", "expected a bool");
            l.damaged = p->get<bool>();
        }
        const int li = static_cast<int>(ins.lines.size());
        if (l.damaged) ins.fault_lines.push_back(li);
        if (l.sw == SwitchKind::MS) ins.ms_lines.push_back(li);
        if (l.sw == SwitchKind::RCS) ins.rcs_lines.push_back(li);
        ins.line_idx_[l.id] = li;
        ins.lines.push_back(std::move(l));
    }

    const json& src_j = member(net, "network", "sources");
    if (!src_j.is_array() || src_j.empty())
        fail("network.sources", "expected a non-empty array");
    std::set<std::string> source_ids;
    for (std::size_t k = 0; k < src_j.size(); ++k) {
        const std::string path = "network.sources[" + std::to_string(k) + "]";
        const json& sj = src_j[k];
        check_fields(sj, path,
                     {"id", "kind", "node", "p_max_kw", "q_max_kvar",
                      "ramp_up_kw_per_slot", "ramp_down_kw_per_slot",
                      "reserve_factor", "freq_response_rate"});
        Source s;
        s.id = str(member(sj, path, "id"), path + ".id");
        if (!source_ids.insert(s.id).second)
            fail(path + ".id", "duplicate source id");
        const std::string kind = str(member(sj, path, "kind"), path + ".kind");
        if (kind == "substation") s.kind = SourceKind::Substation;
        else if (kind == "gt") s.kind = SourceKind::GT;
        else if (kind == "res") s.kind = SourceKind::RES;
        else fail(path + ".kind",
                  "expected \"substation\", \"gt\" or \"res\"");
        const std::string nid = str(member(sj, path, "node"), path + ".node");
        s.node = ins.node_index(nid);
        if (s.node < 0) fail(path + ".node", "unknown node '" + nid + "'");
        s.p_max_kw = series(member(sj, path, "p_max_kw"), path + ".p_max_kw",
                            T, u.power);
        s.q_max_kvar = series(member(sj, path, "q_max_kvar"),
                              path + ".q_max_kvar", T, u.power);
        if (const json* p = opt_member(sj, "ramp_up_kw_per_slot"))
            s.ramp_up_kw = nonneg_num(*p, path + ".ramp_up_kw_per_slot") *
                           u.power;
        if (const json* p = opt_member(sj, "ramp_down_kw_per_slot"))
            s.ramp_down_kw = nonneg_num(*p, path + ".ramp_down_kw_per_slot") *
                             u.power;
        if (const json* p = opt_member(sj, "reserve_factor")) {
            s.reserve_factor = num(*p, path + ".reserve_factor");
            if (s.reserve_factor <= 0.0 || s.reserve_factor > 1.0)
                fail(path + ".reserve_factor",
                     "must be in (0, 1] (it scales the effective ramp rate)");
        }
        if (const json* p = opt_member(sj, "freq_response_rate")) {
            s.freq_response_rate =
                nonneg_num(*p, path + ".freq_response_rate");
            if (s.freq_response_rate > 1.0)
                fail(path + ".freq_response_rate", "must be in [0, 1]");
        }
        ins.sources.push_back(std::move(s));
    }

    // Nodes that start the horizon already energized (their first-slot load
    // becomes the baseline for the frequency-response ramp limit).
    if (const json* p = opt_member(net, "initially_energized_nodes")) {
        if (!p->is_array())
            fail("network.initially_energized_nodes", "expected an array");
        std::set<int> seen_init;
        for (std::size_t k = 0; k < p->size(); ++k) {
            const std::string path =
                "network.initially_energized_nodes[" + std::to_string(k) + "]";
            const int idx =
                ins.node_index(str((*p)[k], path));
            if (idx < 0) fail(path, "unknown node id");
            if (!seen_init.insert(idx).second) fail(path, "duplicate node id");
            ins.initially_energized_nodes.push_back(idx);
        }
        std::sort(ins.initially_energized_nodes.begin(),
                  ins.initially_energized_nodes.end());
    }

    // ---- crews ----
    const json& cr = member(doc, "$", "crews");
    check_fields(cr, "crews",
                 {"travel_speed_kmh", "repair_crews", "operating_crews",
                  "remote_switch_durations_min"});
    ins.travel_speed_kmh = pos_num(member(cr, "crews", "travel_speed_kmh"),
                                   "crews.travel_speed_kmh");

    const json& rcs_j = member(cr, "crews", "repair_crews");
    if (!rcs_j.is_array()) fail("crews.repair_crews", "expected an array");
    std::set<std::string> crew_ids;
    for (std::size_t k = 0; k < rcs_j.size(); ++k) {
        const std::string path = "crews.repair_crews[" + std::to_string(k) +
                                 "]";
        const json& cj = rcs_j[k];
        check_fields(cj, path,
                     {"id", "depot_x_m", "depot_y_m", "repair_durations_min"});
        RepairCrew c;
        c.id = str(member(cj, path, "id"), path + ".id");
        if (!crew_ids.insert(c.id).second)
            fail(path + ".id", "duplicate crew id");
        c.depot_x = num(member(cj, path, "depot_x_m"), path + ".depot_x_m") *
                    u.distance;
        c.depot_y = num(member(cj, path, "depot_y_m"), path + ".depot_y_m") *
                    u.distance;
        const json& dj = member(cj, path, "repair_durations_min");
        if (!dj.is_object())
            fail(path + ".repair_durations_min", "expected an object");
        for (const auto& [lid, dv] : dj.items()) {
            const std::string dpath =
                path + ".repair_durations_min." + lid;
            if (ins.line_index(lid) < 0) fail(dpath, "unknown line");
            c.repair_min[lid] = pos_num(dv, dpath) * u.time;
        }
        ins.repair_crews.push_back(std::move(c));
    }

    const json& ocs_j = member(cr, "crews", "operating_crews");
    if (!ocs_j.is_array()) fail("crews.operating_crews", "expected an array");
    for (std::size_t k = 0; k < ocs_j.size(); ++k) {
        const std::string path =
            "crews.operating_crews[" + std::to_string(k) + "]";
        const json& cj = ocs_j[k];
        check_fields(
            cj, path,
            {"id", "depot_x_m", "depot_y_m", "manual_switch_durations_min"});
        OperatingCrew c;
        c.id = str(member(cj, path, "id"), path + ".id");
        if (!crew_ids.insert(c.id).second)
            fail(path + ".id", "duplicate crew id");
        c.depot_x = num(member(cj, path, "depot_x_m"), path + ".depot_x_m") *
                    u.distance;
        c.depot_y = num(member(cj, path, "depot_y_m"), path + ".depot_y_m") *
                    u.distance;
        const json& dj = member(cj, path, "manual_switch_durations_min");
        if (!dj.is_object())
            fail(path + ".manual_switch_durations_min", "expected an object");
        for (const auto& [sid, dv] : dj.items()) {
            const std::string dpath =
                path + ".manual_switch_durations_min." + sid;
            if (ins.switch_line(sid) < 0) fail(dpath, "unknown switch");
            c.manual_min[sid] = pos_num(dv, dpath) * u.time;
        }
        ins.operating_crews.push_back(std::move(c));
    }

    if (const json* rj = opt_member(cr, "remote_switch_durations_min")) {
        if (!rj->is_object())
            fail("crews.remote_switch_durations_min", "expected an object");
        for (const auto& [sid, dv] : rj->items()) {
            const std::string dpath =
                "crews.remote_switch_durations_min." + sid;
            const int li = ins.switch_line(sid);
            if (li < 0) fail(dpath, "unknown switch");
            if (ins.lines[li].sw != SwitchKind::RCS)
                fail(dpath, "switch is not remotely controllable");
            ins.remote_min[sid] = pos_num(dv, dpath) * u.time;
        }
    }

    // completeness of duration tables
    for (const int li : ins.fault_lines) {
        const Line& l = ins.lines[li];
        for (const auto& c : ins.repair_crews)
            if (!c.repair_min.count(l.id))
                fail("crews.repair_crews",
                     "crew '" + c.id + "' has no repair duration for damaged "
                     "line '" + l.id + "'");
    }
    for (const auto& [sid, li] : ins.switch_idx_) {
        (void)li;
        for (const auto& c : ins.operating_crews)
            if (!c.manual_min.count(sid))
                fail("crews.operating_crews",
                     "crew '" + c.id + "' has no manual duration for switch "
                     "'" + sid + "' (needed for the manual fallback of every "
                     "switch operation)");
    }
    for (const int li : ins.rcs_lines) {
        const Line& l = ins.lines[li];
        if (!ins.remote_min.count(l.switch_id))
            fail("crews.remote_switch_durations_min",
                 "missing remote operation duration for switch '" +
                     l.switch_id + "'");
    }
    if (!ins.fault_lines.empty() && !ins.repair_crews.empty() &&
        ins.fault_lines.size() <
            ins.repair_crews.size())
        ins.warnings.push_back(
            "fewer damaged lines than repair crews: surplus crews will stay "
            "at their depots");
    if (!ins.fault_lines.empty() && ins.repair_crews.empty())
        fail("crews.repair_crews",
             "damaged lines present but no repair crews");
    const bool any_manual_needed = !ins.ms_lines.empty();
    if (any_manual_needed && ins.operating_crews.empty())
        fail("crews.operating_crews",
             "manual switches present but no operating crews");

    // ---- cyber ----
    if (const json* cy = opt_member(doc, "cyber")) {
        check_fields(*cy, "cyber",
                     {"comm_radius_m", "hop_limit", "routers", "links",
                      "blackout_until_slot"});
        ins.comm_radius_m = nonneg_num(member(*cy, "cyber", "comm_radius_m"),
                                       "cyber.comm_radius_m") *
                            u.distance;
        ins.hop_limit = 4;
        if (const json* p = opt_member(*cy, "hop_limit")) {
            if (!p->is_number_integer() || p->get<int>() < 1)
                fail("cyber.hop_limit", "expected a positive integer");
            ins.hop_limit = p->get<int>();
        }
        if (const json* p = opt_member(*cy, "blackout_until_slot")) {
            if (!p->is_number_integer())
                fail("cyber.blackout_until_slot", "expected an integer");
            ins.blackout_until_slot = p->get<int>();
            if (ins.blackout_until_slot < 0 ||
                ins.blackout_until_slot >= T)
                fail("cyber.blackout_until_slot",
                     "must lie within the horizon");
        }
        const json& rt_j = member(*cy, "cyber", "routers");
        if (!rt_j.is_array()) fail("cyber.routers", "expected an array");
        std::map<std::string, int> router_idx;
        for (std::size_t k = 0; k < rt_j.size(); ++k) {
            const std::string path = "cyber.routers[" + std::to_string(k) +
                                     "]";
            const json& rj = rt_j[k];
            check_fields(rj, path,
                         {"id", "role", "x_m", "y_m", "rated_power_kw",
                          "ups_duration_min", "power_node", "rcs"});
            Router r;
            r.id = str(member(rj, path, "id"), path + ".id");
            if (router_idx.count(r.id))
                fail(path + ".id", "duplicate router id");
            const std::string role =
                str(member(rj, path, "role"), path + ".role");
            if (role == "control-centre") r.role = RouterRole::ControlCentre;
            else if (role == "rcs-ftu") r.role = RouterRole::RcsFtu;
            else if (role == "gt") r.role = RouterRole::Gt;
            else if (role == "res") r.role = RouterRole::Res;
            else if (role == "substation") r.role = RouterRole::Substation;
            else if (role == "relay") r.role = RouterRole::Relay;
            else fail(path + ".role",
                      "expected control-centre|rcs-ftu|gt|res|substation|"
                      "relay");
            r.x = num(member(rj, path, "x_m"), path + ".x_m") * u.distance;
            r.y = num(member(rj, path, "y_m"), path + ".y_m") * u.distance;
            r.rated_kw = nonneg_num(member(rj, path, "rated_power_kw"),
                                    path + ".rated_power_kw") *
                         u.power;
            if (const json* p = opt_member(rj, "ups_duration_min"))
                r.ups_min = nonneg_num(*p, path + ".ups_duration_min") *
                            u.time;
            if (const json* p = opt_member(rj, "power_node")) {
                const std::string nid = str(*p, path + ".power_node");
                r.power_node = ins.node_index(nid);
                if (r.power_node < 0)
                    fail(path + ".power_node", "unknown node '" + nid + "'");
            }
            if (const json* p = opt_member(rj, "rcs")) {
                const std::string sid = str(*p, path + ".rcs");
                r.rcs_line = ins.switch_line(sid);
                if (r.rcs_line < 0)
                    fail(path + ".rcs", "unknown switch '" + sid + "'");
                if (ins.lines[r.rcs_line].sw != SwitchKind::RCS)
                    fail(path + ".rcs", "switch is not remotely controllable");
            }
            if (r.role == RouterRole::RcsFtu && r.rcs_line < 0)
                fail(path + ".rcs", "rcs-ftu router must name its switch");
            if (r.role != RouterRole::ControlCentre && r.power_node < 0)
                fail(path + ".power_node",
                     "router must name its supplying node");
            if (r.role == RouterRole::ControlCentre) {
                if (ins.control_centre >= 0)
                    fail(path + ".role", "second control-centre");
                ins.control_centre = static_cast<int>(ins.routers.size());
            }
            router_idx[r.id] = static_cast<int>(ins.routers.size());
            ins.routers.push_back(std::move(r));
        }
        if (!ins.routers.empty() && ins.control_centre < 0)
            fail("cyber.routers", "no control-centre router");

        if (const json* lk = opt_member(*cy, "links")) {
            if (!lk->is_array()) fail("cyber.links", "expected an array");
            for (std::size_t k = 0; k < lk->size(); ++k) {
                const std::string path =
                    "cyber.links[" + std::to_string(k) + "]";
                const json& ej = (*lk)[k];
                check_fields(ej, path, {"router", "path"});
                const std::string rid =
                    str(member(ej, path, "router"), path + ".router");
                auto it = router_idx.find(rid);
                if (it == router_idx.end())
                    fail(path + ".router", "unknown router '" + rid + "'");
                const json& pj = member(ej, path, "path");
                if (!pj.is_array() || pj.size() < 2)
                    fail(path + ".path",
                         "expected an array of at least two router ids");
                std::vector<int> seq;
                for (std::size_t i = 0; i < pj.size(); ++i) {
                    const std::string hop =
                        str(pj[i], path + ".path[" + std::to_string(i) + "]");
                    auto ht = router_idx.find(hop);
                    if (ht == router_idx.end())
                        fail(path + ".path[" + std::to_string(i) + "]",
                             "unknown router '" + hop + "'");
                    seq.push_back(ht->second);
                }
                if (seq.front() != it->second)
                    fail(path + ".path", "must start at the owning router");
                if (seq.back() != ins.control_centre)
                    fail(path + ".path", "must end at the control centre");
                for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
                    const Router& a = ins.routers[seq[i]];
                    const Router& b = ins.routers[seq[i + 1]];
                    if (std::hypot(a.x - b.x, a.y - b.y) >
                        ins.comm_radius_m + 1e-9)
                        fail(path + ".path",
                             "consecutive routers exceed the communication "
                             "radius");
                }
                ins.routers[it->second].links.push_back(std::move(seq));
            }
        } else if (ins.control_centre >= 0) {
            derive_links(ins);
        }
        for (std::size_t k = 0; k < ins.routers.size(); ++k) {
            const Router& r = ins.routers[k];
            if (static_cast<int>(k) != ins.control_centre &&
                r.links.empty() && r.role != RouterRole::Relay)
                ins.warnings.push_back(
                    "router '" + r.id + "' has no viable link to the control "
                    "centre and is permanently unreachable");
        }
    }
    // every RCS needs a driving FTU to ever be remotely operated
    for (const int li : ins.rcs_lines) {
        bool has_ftu = false;
        for (const auto& r : ins.routers)
            if (r.role == RouterRole::RcsFtu && r.rcs_line == li)
                has_ftu = true;
        if (!has_ftu)
            ins.warnings.push_back(
                "remotely controllable switch '" + ins.lines[li].switch_id +
                "' has no FTU router; it can only be operated manually");
    }

    // ---- uncertainty ----
    if (const json* un = opt_member(doc, "uncertainty")) {
        check_fields(*un, "uncertainty", {"max_error", "budget", "bits"});
        auto source_by_id = [&](const std::string& id,
                                const std::string& path) -> Source& {
            for (auto& s : ins.sources)
                if (s.id == id) {
                    if (s.kind != SourceKind::RES)
                        fail(path, "source '" + id + "' is not renewable");
                    return s;
                }
            fail(path, "unknown source '" + id + "'");
        };
        if (const json* p = opt_member(*un, "max_error")) {
            if (!p->is_object())
                fail("uncertainty.max_error", "expected an object");
            for (const auto& [sid, v] : p->items()) {
                const std::string path = "uncertainty.max_error." + sid;
                Source& s = source_by_id(sid, path);
                s.max_error = num(v, path);
                if (s.max_error < 0.0 || s.max_error > 1.0)
                    fail(path, "must lie in [0, 1]");
            }
        }
        if (const json* p = opt_member(*un, "budget")) {
            if (!p->is_object())
                fail("uncertainty.budget", "expected an object");
            for (const auto& [sid, v] : p->items()) {
                const std::string path = "uncertainty.budget." + sid;
                Source& s = source_by_id(sid, path);
                s.budget = nonneg_num(v, path);
                if (s.budget > 2.0 * T) {
                    s.budget = 2.0 * T;
                    ins.warnings.push_back(
                        "uncertainty budget for '" + sid +
                        "' exceeds 2*slots; clamped (budget inactive)");
                }
            }
        }
        if (const json* p = opt_member(*un, "bits")) {
            if (!p->is_number_integer() || p->get<int>() < 0 ||
                p->get<int>() > 16)
                fail("uncertainty.bits", "expected an integer in [0, 16]");
            ins.sigma_bits = p->get<int>();
        }
    }

    enforce_boundary_separation(ins);
    return ins;
}

Instance load_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("$", "cannot open instance file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_instance(ss.str());
}

}  // namespace rsched::core
