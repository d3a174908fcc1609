#include "rsched/model/emit_crew.hpp"

#include <algorithm>
#include <cmath>

#include "rsched/core/travel.hpp"

namespace rsched::model {

namespace {

using core::Instance;
using core::NodeCellGraph;
using core::Site;

// Greedy assignment: candidate (distance, task, crew) triples ascending,
// each task goes to the first crew with remaining capacity.  Ties resolve
// by task position then crew position, so the split is deterministic.
std::vector<std::vector<int>> greedy_clusters(const std::vector<Site>& depots,
                                              const std::vector<Site>& tasks) {
    std::vector<std::vector<int>> out(depots.size());
    if (tasks.empty() || depots.empty()) return out;
    const std::size_t cap = (tasks.size() + depots.size() - 1) / depots.size();
    struct Cand {
        double d;
        int task, crew;
    };
    std::vector<Cand> cands;
    cands.reserve(tasks.size() * depots.size());
    for (std::size_t k = 0; k < tasks.size(); ++k)
        for (std::size_t c = 0; c < depots.size(); ++c)
            cands.push_back({std::hypot(tasks[k].x - depots[c].x,
                                        tasks[k].y - depots[c].y),
                             static_cast<int>(k), static_cast<int>(c)});
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.d != b.d) return a.d < b.d;
        if (a.task != b.task) return a.task < b.task;
        return a.crew < b.crew;
    });
    std::vector<char> assigned(tasks.size(), 0);
    for (const Cand& c : cands) {
        if (assigned[std::size_t(c.task)]) continue;
        if (out[std::size_t(c.crew)].size() >= cap) continue;
        assigned[std::size_t(c.task)] = 1;
        out[std::size_t(c.crew)].push_back(c.task);
    }
    for (auto& cluster : out) std::sort(cluster.begin(), cluster.end());
    return out;
}

std::string cell_token(int nc) { return "nc" + std::to_string(nc); }

}  // namespace

std::string route_var(const std::string& crew, const std::string& from,
                      const std::string& to) {
    return "route[" + crew + ":" + from + "->" + to + "]";
}

std::string arrival_var(const std::string& crew, const std::string& task) {
    return "at[" + crew + "," + task + "]";
}

std::string safe_start_var(const std::string& crew, const std::string& task) {
    return "ocs[" + crew + "," + task + "]";
}

std::string slot_var(const std::string& prefix, const std::string& entity,
                     int t) {
    return prefix + "[" + entity + "," + std::to_string(t) + "]";
}

Clusters cluster_tasks(const Instance& ins) {
    Clusters out;
    for (std::size_t li = 0; li < ins.lines.size(); ++li)
        if (ins.lines[li].sw != core::SwitchKind::None)
            out.switch_lines.push_back(static_cast<int>(li));

    std::vector<Site> rdep, fsite;
    for (const auto& rc : ins.repair_crews)
        rdep.push_back({rc.depot_x, rc.depot_y});
    for (const int li : ins.fault_lines) fsite.push_back(line_site(ins, li));
    out.repair_tasks = greedy_clusters(rdep, fsite);

    std::vector<Site> odep, ssite;
    for (const auto& oc : ins.operating_crews)
        odep.push_back({oc.depot_x, oc.depot_y});
    for (const int li : out.switch_lines) ssite.push_back(line_site(ins, li));
    out.switch_tasks = greedy_clusters(odep, ssite);
    return out;
}

CrewRefs emit_crew_dispatch(const Instance& ins, const NodeCellGraph& cells,
                            ModelBuilder& mb) {
    CrewRefs refs;
    refs.clusters = cluster_tasks(ins);
    const Clusters& cl = refs.clusters;

    const double tmax = ins.horizon.t_max_min;
    const double dt = ins.horizon.slot_min;
    const double eps = ins.horizon.epsilon_min;
    const int slots = ins.horizon.slots;
    const double speed = ins.travel_speed_kmh;

    const int nf = static_cast<int>(ins.fault_lines.size());
    const int ns = static_cast<int>(cl.switch_lines.size());

    // Task geometry and naming.
    std::vector<Site> fsite(nf), ssite(ns);
    std::vector<std::string> fid(nf), sid(ns);
    for (int k = 0; k < nf; ++k) {
        fsite[std::size_t(k)] = line_site(ins, ins.fault_lines[std::size_t(k)]);
        fid[std::size_t(k)] = ins.lines[std::size_t(ins.fault_lines[std::size_t(k)])].id;
    }
    for (int k = 0; k < ns; ++k) {
        ssite[std::size_t(k)] = line_site(ins, cl.switch_lines[std::size_t(k)]);
        sid[std::size_t(k)] =
            ins.lines[std::size_t(cl.switch_lines[std::size_t(k)])].switch_id;
    }

    // One big-M covering every arrival-chain gap: latest possible departure
    // (tmax) plus the longest task and the longest leg between any two
    // modeled sites.
    double max_travel = 0.0, max_dur = 0.0;
    {
        std::vector<Site> sites;
        for (std::size_t c = 0; c < ins.repair_crews.size(); ++c)
            if (!cl.repair_tasks[c].empty())
                sites.push_back({ins.repair_crews[c].depot_x,
                                 ins.repair_crews[c].depot_y});
        for (std::size_t c = 0; c < ins.operating_crews.size(); ++c)
            if (!cl.switch_tasks[c].empty())
                sites.push_back({ins.operating_crews[c].depot_x,
                                 ins.operating_crews[c].depot_y});
        sites.insert(sites.end(), fsite.begin(), fsite.end());
        sites.insert(sites.end(), ssite.begin(), ssite.end());
        for (std::size_t a = 0; a < sites.size(); ++a)
            for (std::size_t b = a + 1; b < sites.size(); ++b)
                max_travel = std::max(
                    max_travel, core::travel_minutes(sites[a], sites[b], speed));
        for (std::size_t c = 0; c < ins.repair_crews.size(); ++c)
            for (const int k : cl.repair_tasks[c])
                max_dur = std::max(max_dur,
                                   ins.repair_crews[c].repair_min.at(
                                       fid[std::size_t(k)]));
        for (std::size_t c = 0; c < ins.operating_crews.size(); ++c)
            for (const int k : cl.switch_tasks[c])
                max_dur = std::max(max_dur,
                                   ins.operating_crews[c].manual_min.at(
                                       sid[std::size_t(k)]));
    }
    const double m_arr = tmax + max_dur + max_travel;
    const double m_tl = tmax + (slots - 1) * dt + eps;

    // ------------------------------------------------------------------
    // Repair-crew routing and arrival times.
    // ------------------------------------------------------------------
    // Per fault position: arrival var, incoming arcs and duration of its
    // owning crew (clusters partition tasks, so there is exactly one).
    struct Visit {
        int crew = -1;
        int at = -1;                  // arrival variable
        int start = -1;               // var the task effectively starts at
                                      // (arrival for repairs, safe start for
                                      // switch operations)
        double dur = 0.0;
        std::vector<int> incoming;    // arc variables ending at the task
    };
    std::vector<Visit> fvisit(static_cast<std::size_t>(nf));
    std::vector<Visit> svisit(static_cast<std::size_t>(ns));

    for (std::size_t c = 0; c < ins.repair_crews.size(); ++c) {
        const auto& crew = ins.repair_crews[c];
        const std::vector<int>& K = cl.repair_tasks[c];
        if (K.empty()) continue;  // surplus crew: not modeled at all
        const Site dep{crew.depot_x, crew.depot_y};

        std::vector<int> xdep(K.size()), xret(K.size()), at(K.size());
        std::vector<std::vector<int>> arc(K.size(),
                                          std::vector<int>(K.size(), -1));
        for (std::size_t a = 0; a < K.size(); ++a) {
            const std::string& ta = fid[std::size_t(K[a])];
            xdep[a] = mb.add_binary(route_var(crew.id, "depot", ta),
                                    Stage::First);
            xret[a] = mb.add_binary(route_var(crew.id, ta, "depot"),
                                    Stage::First);
            at[a] = mb.add_continuous(arrival_var(crew.id, ta), Stage::First,
                                      0.0, tmax);
        }
        for (std::size_t a = 0; a < K.size(); ++a)
            for (std::size_t b = 0; b < K.size(); ++b)
                if (a != b)
                    arc[a][b] = mb.add_binary(
                        route_var(crew.id, fid[std::size_t(K[a])],
                                  fid[std::size_t(K[b])]),
                        Stage::First);

        // Leave the depot once and come back once.
        {
            std::vector<Term> lv, rt;
            for (std::size_t a = 0; a < K.size(); ++a) {
                lv.push_back({xdep[a], 1.0});
                rt.push_back({xret[a], 1.0});
            }
            mb.add_row("leave[" + crew.id + "]", RowSense::EQ, 1.0, lv);
            mb.add_row("return[" + crew.id + "]", RowSense::EQ, 1.0, rt);
        }

        for (std::size_t a = 0; a < K.size(); ++a) {
            const std::string& ta = fid[std::size_t(K[a])];
            // In-degree equals out-degree at every task.
            std::vector<Term> flow{{xdep[a], 1.0}, {xret[a], -1.0}};
            for (std::size_t b = 0; b < K.size(); ++b)
                if (b != a) {
                    flow.push_back({arc[b][a], 1.0});
                    flow.push_back({arc[a][b], -1.0});
                }
            mb.add_row("flow[" + crew.id + "," + ta + "]", RowSense::EQ, 0.0,
                       flow);

            // Arrival from the depot pins the time exactly when taken.
            const double legd =
                core::travel_minutes(dep, fsite[std::size_t(K[a])], speed);
            mb.add_row("arr_lo[" + crew.id + ":depot->" + ta + "]",
                       RowSense::GE, legd - m_arr,
                       {{at[a], 1.0}, {xdep[a], -m_arr}});
            mb.add_row("arr_hi[" + crew.id + ":depot->" + ta + "]",
                       RowSense::LE, legd + m_arr,
                       {{at[a], 1.0}, {xdep[a], m_arr}});

            // Unvisited tasks park at the horizon guard time.
            std::vector<Term> pin{{at[a], 1.0}, {xdep[a], tmax}};
            for (std::size_t b = 0; b < K.size(); ++b)
                if (b != a) pin.push_back({arc[b][a], tmax});
            mb.add_row("arr_pin[" + crew.id + "," + ta + "]", RowSense::GE,
                       tmax, pin);

            fvisit[std::size_t(K[a])].incoming.push_back(xdep[a]);
        }

        for (std::size_t a = 0; a < K.size(); ++a)
            for (std::size_t b = 0; b < K.size(); ++b) {
                if (a == b) continue;
                const std::string& ta = fid[std::size_t(K[a])];
                const std::string& tb = fid[std::size_t(K[b])];
                const double leg =
                    crew.repair_min.at(ta) +
                    core::travel_minutes(fsite[std::size_t(K[a])],
                                         fsite[std::size_t(K[b])], speed);
                mb.add_row("arr_lo[" + crew.id + ":" + ta + "->" + tb + "]",
                           RowSense::GE, leg - m_arr,
                           {{at[b], 1.0}, {at[a], -1.0}, {arc[a][b], -m_arr}});
                mb.add_row("arr_hi[" + crew.id + ":" + ta + "->" + tb + "]",
                           RowSense::LE, leg + m_arr,
                           {{at[b], 1.0}, {at[a], -1.0}, {arc[a][b], m_arr}});
                if (a < b)
                    mb.add_row("no2cyc[" + crew.id + ":" + ta + "," + tb + "]",
                               RowSense::LE, 1.0,
                               {{arc[a][b], 1.0}, {arc[b][a], 1.0}});
                fvisit[std::size_t(K[b])].incoming.push_back(arc[a][b]);
            }

        for (std::size_t a = 0; a < K.size(); ++a) {
            Visit& v = fvisit[std::size_t(K[a])];
            v.crew = static_cast<int>(c);
            v.at = at[a];
            v.start = at[a];
            v.dur = crew.repair_min.at(fid[std::size_t(K[a])]);
        }
    }

    // Every fault is repaired exactly once.
    for (int k = 0; k < nf; ++k) {
        const Visit& v = fvisit[std::size_t(k)];
        if (v.crew < 0) continue;  // no crews: loader already warned/errored
        std::vector<Term> cov;
        for (const int x : v.incoming) cov.push_back({x, 1.0});
        mb.add_row("cover[f:" + fid[std::size_t(k)] + "]", RowSense::EQ, 1.0,
                   cov);
    }

    // Repair completion: te = arrival + duration of the visiting crew.
    // The selector keeps the two-sided form valid even for tasks that end
    // up unvisited (switch operations below reuse the same mechanics).
    refs.te_fault.resize(std::size_t(nf), -1);
    for (int k = 0; k < nf; ++k) {
        const Visit& v = fvisit[std::size_t(k)];
        const std::string tok = "f:" + fid[std::size_t(k)];
        const int te =
            mb.add_continuous("te[" + tok + "]", Stage::First, 0.0, tmax);
        refs.te_fault[std::size_t(k)] = te;
        if (v.crew < 0) continue;
        const std::string& cid = ins.repair_crews[std::size_t(v.crew)].id;
        const int beta = mb.add_binary(
            "beta[" + cid + "," + fid[std::size_t(k)] + "]", Stage::First);
        mb.add_row("bsum[" + tok + "]", RowSense::EQ, 1.0, {{beta, 1.0}});

        std::vector<Term> hi{{te, 1.0}, {v.start, -1.0}};
        for (const int x : v.incoming) hi.push_back({x, -v.dur});
        mb.add_row("te_hi[" + tok + "," + cid + "]", RowSense::LE, 0.0, hi);

        std::vector<Term> lo{{te, 1.0}, {v.start, -1.0}, {beta, -tmax}};
        for (const int x : v.incoming) lo.push_back({x, -v.dur});
        mb.add_row("te_lo[" + tok + "," + cid + "]", RowSense::GE, -tmax, lo);
    }

    // ------------------------------------------------------------------
    // Cell clearance times: last repair inside the cell (0 when no fault).
    // ------------------------------------------------------------------
    std::vector<int> fault_pos(ins.lines.size(), -1);
    for (int k = 0; k < nf; ++k)
        fault_pos[std::size_t(ins.fault_lines[std::size_t(k)])] = k;

    refs.tncr_cell.resize(std::size_t(cells.cell_count()), -1);
    for (int nc = 0; nc < cells.cell_count(); ++nc) {
        const int v = mb.add_continuous("tncr[" + cell_token(nc) + "]",
                                        Stage::First, 0.0, tmax);
        refs.tncr_cell[std::size_t(nc)] = v;
        const auto& faults = cells.cells[std::size_t(nc)].faults;
        if (faults.empty()) {
            mb.fix(v, 0.0);
            continue;
        }
        for (const int li : faults) {
            const int k = fault_pos[std::size_t(li)];
            mb.add_row("tncr[" + cell_token(nc) + ",f:" + fid[std::size_t(k)] +
                           "]",
                       RowSense::GE, 0.0,
                       {{v, 1.0}, {refs.te_fault[std::size_t(k)], -1.0}});
        }
    }

    // Safe time per switch: both adjacent cells cleared.
    refs.tncr_sw.resize(std::size_t(ns), -1);
    {
        std::vector<int> edge_of_line(ins.lines.size(), -1);
        for (std::size_t e = 0; e < cells.edges.size(); ++e)
            edge_of_line[std::size_t(cells.edges[e].line)] =
                static_cast<int>(e);
        for (int k = 0; k < ns; ++k) {
            const int v =
                mb.add_continuous("tncrsw[" + sid[std::size_t(k)] + "]",
                                  Stage::First, 0.0, tmax);
            refs.tncr_sw[std::size_t(k)] = v;
            const core::CellEdge& e = cells.edges[std::size_t(
                edge_of_line[std::size_t(cl.switch_lines[std::size_t(k)])])];
            for (const int nc : {e.cell_a, e.cell_b}) {
                if (mb.var(refs.tncr_cell[std::size_t(nc)]).ub == 0.0)
                    continue;  // fault-free cell clears at 0; row is vacuous
                mb.add_row("tncrsw[" + sid[std::size_t(k)] + "," +
                               cell_token(nc) + "]",
                           RowSense::GE, 0.0,
                           {{v, 1.0},
                            {refs.tncr_cell[std::size_t(nc)], -1.0}});
            }
        }
    }

    // ------------------------------------------------------------------
    // Operating-crew routing.  Identical flow structure, three twists:
    // a crew may stay home (depot self-loop), switches may stay untouched
    // (coverage at most once), and a chained departure waits for the safe
    // start (arrival or both-sides-cleared, whichever is later) plus the
    // manual operation itself.
    // ------------------------------------------------------------------
    for (std::size_t c = 0; c < ins.operating_crews.size(); ++c) {
        const auto& crew = ins.operating_crews[c];
        const std::vector<int>& K = cl.switch_tasks[c];
        if (K.empty()) continue;
        const Site dep{crew.depot_x, crew.depot_y};

        const int xhome = mb.add_binary(route_var(crew.id, "depot", "depot"),
                                        Stage::First);
        std::vector<int> xdep(K.size()), xret(K.size()), at(K.size()),
            ocs(K.size());
        std::vector<std::vector<int>> arc(K.size(),
                                          std::vector<int>(K.size(), -1));
        for (std::size_t a = 0; a < K.size(); ++a) {
            const std::string& ta = sid[std::size_t(K[a])];
            xdep[a] = mb.add_binary(route_var(crew.id, "depot", ta),
                                    Stage::First);
            xret[a] = mb.add_binary(route_var(crew.id, ta, "depot"),
                                    Stage::First);
            at[a] = mb.add_continuous(arrival_var(crew.id, ta), Stage::First,
                                      0.0, tmax);
            ocs[a] = mb.add_continuous(safe_start_var(crew.id, ta),
                                       Stage::First, 0.0, tmax);
        }
        for (std::size_t a = 0; a < K.size(); ++a)
            for (std::size_t b = 0; b < K.size(); ++b)
                if (a != b)
                    arc[a][b] = mb.add_binary(
                        route_var(crew.id, sid[std::size_t(K[a])],
                                  sid[std::size_t(K[b])]),
                        Stage::First);

        {
            std::vector<Term> lv{{xhome, 1.0}}, rt{{xhome, 1.0}};
            for (std::size_t a = 0; a < K.size(); ++a) {
                lv.push_back({xdep[a], 1.0});
                rt.push_back({xret[a], 1.0});
            }
            mb.add_row("leave[" + crew.id + "]", RowSense::EQ, 1.0, lv);
            mb.add_row("return[" + crew.id + "]", RowSense::EQ, 1.0, rt);
        }

        for (std::size_t a = 0; a < K.size(); ++a) {
            const std::string& ta = sid[std::size_t(K[a])];
            std::vector<Term> flow{{xdep[a], 1.0}, {xret[a], -1.0}};
            for (std::size_t b = 0; b < K.size(); ++b)
                if (b != a) {
                    flow.push_back({arc[b][a], 1.0});
                    flow.push_back({arc[a][b], -1.0});
                }
            mb.add_row("flow[" + crew.id + "," + ta + "]", RowSense::EQ, 0.0,
                       flow);

            const double legd =
                core::travel_minutes(dep, ssite[std::size_t(K[a])], speed);
            mb.add_row("arr_lo[" + crew.id + ":depot->" + ta + "]",
                       RowSense::GE, legd - m_arr,
                       {{at[a], 1.0}, {xdep[a], -m_arr}});
            mb.add_row("arr_hi[" + crew.id + ":depot->" + ta + "]",
                       RowSense::LE, legd + m_arr,
                       {{at[a], 1.0}, {xdep[a], m_arr}});

            std::vector<Term> pin{{at[a], 1.0}, {xdep[a], tmax}};
            for (std::size_t b = 0; b < K.size(); ++b)
                if (b != a) pin.push_back({arc[b][a], tmax});
            mb.add_row("arr_pin[" + crew.id + "," + ta + "]", RowSense::GE,
                       tmax, pin);

            // Safe start: no earlier than arrival, no earlier than the
            // moment both neighbouring cells are cleared.
            mb.add_row("ocs_at[" + crew.id + "," + ta + "]", RowSense::GE,
                       0.0, {{ocs[a], 1.0}, {at[a], -1.0}});
            mb.add_row(
                "ocs_clr[" + crew.id + "," + ta + "]", RowSense::GE, 0.0,
                {{ocs[a], 1.0}, {refs.tncr_sw[std::size_t(K[a])], -1.0}});

            svisit[std::size_t(K[a])].incoming.push_back(xdep[a]);
        }

        for (std::size_t a = 0; a < K.size(); ++a)
            for (std::size_t b = 0; b < K.size(); ++b) {
                if (a == b) continue;
                const std::string& ta = sid[std::size_t(K[a])];
                const std::string& tb = sid[std::size_t(K[b])];
                const double leg =
                    crew.manual_min.at(ta) +
                    core::travel_minutes(ssite[std::size_t(K[a])],
                                         ssite[std::size_t(K[b])], speed);
                mb.add_row("arr_lo[" + crew.id + ":" + ta + "->" + tb + "]",
                           RowSense::GE, leg - m_arr,
                           {{at[b], 1.0}, {ocs[a], -1.0}, {arc[a][b], -m_arr}});
                mb.add_row("arr_hi[" + crew.id + ":" + ta + "->" + tb + "]",
                           RowSense::LE, leg + m_arr,
                           {{at[b], 1.0}, {ocs[a], -1.0}, {arc[a][b], m_arr}});
                if (a < b)
                    mb.add_row("no2cyc[" + crew.id + ":" + ta + "," + tb + "]",
                               RowSense::LE, 1.0,
                               {{arc[a][b], 1.0}, {arc[b][a], 1.0}});
                svisit[std::size_t(K[b])].incoming.push_back(arc[a][b]);
            }

        for (std::size_t a = 0; a < K.size(); ++a) {
            Visit& v = svisit[std::size_t(K[a])];
            v.crew = static_cast<int>(c);
            v.at = at[a];
            v.start = ocs[a];
            v.dur = crew.manual_min.at(sid[std::size_t(K[a])]);
        }
    }

    // A switch is operated manually at most once.
    for (int k = 0; k < ns; ++k) {
        const Visit& v = svisit[std::size_t(k)];
        if (v.crew < 0) continue;
        std::vector<Term> cov;
        for (const int x : v.incoming) cov.push_back({x, 1.0});
        mb.add_row("cover[s:" + sid[std::size_t(k)] + "]", RowSense::LE, 1.0,
                   cov);
    }

    // Manual-close completion: safe start plus operation when visited,
    // parked at the guard time when not.
    refs.te_switch.resize(std::size_t(ns), -1);
    for (int k = 0; k < ns; ++k) {
        const Visit& v = svisit[std::size_t(k)];
        const std::string tok = "s:" + sid[std::size_t(k)];
        const int te =
            mb.add_continuous("te[" + tok + "]", Stage::First, 0.0, tmax);
        refs.te_switch[std::size_t(k)] = te;
        if (v.crew < 0) {
            // No crew can reach this switch; it can never close manually.
            mb.fix(te, tmax);
            continue;
        }
        const std::string& cid = ins.operating_crews[std::size_t(v.crew)].id;
        const int beta = mb.add_binary(
            "beta[" + cid + "," + sid[std::size_t(k)] + "]", Stage::First);
        mb.add_row("bsum[" + tok + "]", RowSense::EQ, 1.0, {{beta, 1.0}});

        std::vector<Term> hi{{te, 1.0}, {v.start, -1.0}};
        for (const int x : v.incoming) hi.push_back({x, -v.dur});
        mb.add_row("te_hi[" + tok + "," + cid + "]", RowSense::LE, 0.0, hi);

        std::vector<Term> lo{{te, 1.0}, {v.start, -1.0}, {beta, -tmax}};
        for (const int x : v.incoming) lo.push_back({x, -v.dur});
        mb.add_row("te_lo[" + tok + "," + cid + "]", RowSense::GE, -tmax, lo);
    }

    // ------------------------------------------------------------------
    // Status timelines.  A continuous completion time T and slot t satisfy
    //   status = 1  <=>  (t-1)*dt >= T
    // through the big-M pair below; instance loading already pushed every
    // completion candidate away from slot boundaries by more than eps.
    // ------------------------------------------------------------------
    const auto emit_steps = [&](const std::string& prefix,
                                const std::string& entity, int tevar,
                                std::vector<int>& dst) {
        dst.resize(std::size_t(slots), -1);
        for (int t = 1; t <= slots; ++t) {
            const int u = mb.add_binary(slot_var(prefix, entity, t),
                                        Stage::First);
            dst[std::size_t(t - 1)] = u;
            const double wall = (t - 1) * dt + eps;
            mb.add_row(prefix + "_on[" + entity + "," + std::to_string(t) +
                           "]",
                       RowSense::GE, wall, {{u, m_tl}, {tevar, 1.0}});
            mb.add_row(prefix + "_off[" + entity + "," + std::to_string(t) +
                           "]",
                       RowSense::LE, m_tl + wall, {{u, m_tl}, {tevar, 1.0}});
        }
    };

    refs.uL.resize(std::size_t(nf));
    for (int k = 0; k < nf; ++k)
        emit_steps("uL", fid[std::size_t(k)], refs.te_fault[std::size_t(k)],
                   refs.uL[std::size_t(k)]);

    refs.wMS.resize(std::size_t(ns));
    for (int k = 0; k < ns; ++k)
        emit_steps("wMS", sid[std::size_t(k)], refs.te_switch[std::size_t(k)],
                   refs.wMS[std::size_t(k)]);

    // Merged closing status; its defining rows arrive with the remote-close
    // layer (which owns the remote side of the disjunction).
    refs.w.resize(std::size_t(ns));
    for (int k = 0; k < ns; ++k) {
        refs.w[std::size_t(k)].resize(std::size_t(slots), -1);
        for (int t = 1; t <= slots; ++t)
            refs.w[std::size_t(k)][std::size_t(t - 1)] = mb.add_binary(
                slot_var("w", sid[std::size_t(k)], t), Stage::First);
    }

    // Cell-cleared flags, capped by the repair status of every fault
    // assigned to the cell.
    refs.uNC.resize(std::size_t(cells.cell_count()));
    for (int nc = 0; nc < cells.cell_count(); ++nc) {
        auto& row = refs.uNC[std::size_t(nc)];
        row.resize(std::size_t(slots), -1);
        for (int t = 1; t <= slots; ++t) {
            const int u = mb.add_binary(slot_var("uNC", cell_token(nc), t),
                                        Stage::First);
            row[std::size_t(t - 1)] = u;
            for (const int li : cells.cells[std::size_t(nc)].faults) {
                const int k = fault_pos[std::size_t(li)];
                mb.add_row("unc_gate[" + cell_token(nc) + ",f:" +
                               fid[std::size_t(k)] + "," + std::to_string(t) +
                               "]",
                           RowSense::LE, 0.0,
                           {{u, 1.0},
                            {refs.uL[std::size_t(k)][std::size_t(t - 1)],
                             -1.0}});
            }
        }
    }

    return refs;
}

}  // namespace rsched::model
