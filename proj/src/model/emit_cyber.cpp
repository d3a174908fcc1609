#include "rsched/model/emit_cyber.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace rsched::model {

namespace {

using core::Instance;
using core::NodeCellGraph;
using core::Router;
using core::RouterRole;
using core::SwitchKind;

// Roles whose availability requires a live path to the control centre.
bool needs_reach(RouterRole role) {
    return role == RouterRole::RcsFtu || role == RouterRole::Gt ||
           role == RouterRole::Relay;
}

}  // namespace

std::string link_var(const std::string& router, int k, int t) {
    return "link[" + router + ":" + std::to_string(k) + "," +
           std::to_string(t) + "]";
}

CyberRefs emit_cyber_coupling(const Instance& ins,
                              const NodeCellGraph& cells,
                              const CrewRefs& crew, const GridRefs& grid,
                              ModelBuilder& mb) {
    const int nr = static_cast<int>(ins.routers.size());
    const int slots = ins.horizon.slots;
    const double dt = ins.horizon.slot_min;
    const double eps = ins.horizon.epsilon_min;
    const double tmax = ins.horizon.t_max_min;

    CyberRefs c;
    c.uc.assign(static_cast<std::size_t>(nr),
                std::vector<int>(static_cast<std::size_t>(slots), -1));
    c.ups = c.uc;
    c.ulink.resize(static_cast<std::size_t>(nr));
    c.wrcs.assign(crew.clusters.switch_lines.size(),
                  std::vector<int>(static_cast<std::size_t>(slots), -1));

    // big-M of the power floor: dominates any served load at one node
    double total_load = 0.0;
    for (const auto& nd : ins.nodes)
        for (double v : nd.load_kw) total_load = std::max(total_load, v);
    const double m_pw = 10.0 * std::max(1.0, total_load);

    // ---- availability and backup-power variables
    for (int r = 0; r < nr; ++r) {
        const Router& rt = ins.routers[std::size_t(r)];
        const bool centre = r == ins.control_centre;
        const bool dead = needs_reach(rt.role) && rt.links.empty() && !centre;
        for (int t = 0; t < slots; ++t) {
            int uc = mb.add_binary(slot_var("uc", rt.id, t + 1),
                                   Stage::First);
            int up = mb.add_binary(slot_var("ups", rt.id, t + 1),
                                   Stage::First);
            c.uc[std::size_t(r)][std::size_t(t)] = uc;
            c.ups[std::size_t(r)][std::size_t(t)] = up;
            // backup power is a pure function of elapsed time
            mb.fix(up, (t + 1) * dt <= rt.ups_min + eps ? 1.0 : 0.0);
            if (centre) mb.fix(uc, 1.0);
            else if (dead) mb.fix(uc, 0.0);
            else if (t + 1 <= ins.blackout_until_slot) mb.fix(uc, 0.0);
        }
    }

    // ---- per-router coupling rows
    for (int r = 0; r < nr; ++r) {
        const Router& rt = ins.routers[std::size_t(r)];
        const bool centre = r == ins.control_centre;
        const bool dead = needs_reach(rt.role) && rt.links.empty() && !centre;
        c.ulink[std::size_t(r)].assign(
            rt.links.size(),
            std::vector<int>(static_cast<std::size_t>(slots), -1));
        if (centre) continue;

        for (int t = 0; t < slots; ++t) {
            const bool dark = t + 1 <= ins.blackout_until_slot;
            // candidate paths: usable only with every member router up
            for (std::size_t k = 0; k < rt.links.size(); ++k) {
                int lv = mb.add_binary(link_var(rt.id, static_cast<int>(k),
                                                t + 1),
                                       Stage::First);
                c.ulink[std::size_t(r)][k][std::size_t(t)] = lv;
                if (dark || dead) {
                    mb.fix(lv, 0.0);
                    continue;
                }
                const auto& path = rt.links[k];
                std::vector<Term> terms{{lv, 1.0}};
                const double share = 1.0 / static_cast<double>(path.size());
                for (int member : path)
                    terms.push_back(
                        {c.uc[std::size_t(member)][std::size_t(t)], -share});
                mb.add_row("linkup[" + rt.id + ":" + std::to_string(k) +
                               "," + std::to_string(t + 1) + "]",
                           RowSense::LE, 0.0, std::move(terms));
            }
            if (dark || dead) continue;

            const int uc = c.uc[std::size_t(r)][std::size_t(t)];
            const int up = c.ups[std::size_t(r)][std::size_t(t)];

            // reaching the centre needs at least one usable path
            if (needs_reach(rt.role)) {
                std::vector<Term> terms{{uc, 1.0}};
                for (std::size_t k = 0; k < rt.links.size(); ++k)
                    terms.push_back(
                        {c.ulink[std::size_t(r)][k][std::size_t(t)], -1.0});
                mb.add_row(slot_var("reach", rt.id, t + 1), RowSense::LE,
                           0.0, std::move(terms));
            }

            // power prerequisite at the supply node
            const int node = rt.power_node;
            const double load =
                node >= 0 ? ins.nodes[std::size_t(node)]
                                .load_kw[std::size_t(t)]
                          : 0.0;
            const int sh =
                node >= 0 ? grid.shed[std::size_t(node)][std::size_t(t)]
                          : -1;
            // served load above the router draw forces availability on
            if (load > rt.rated_kw && sh >= 0)
                mb.add_row(slot_var("cpow_lo", rt.id, t + 1), RowSense::GE,
                           load - rt.rated_kw, {{uc, m_pw}, {sh, 1.0}});
            // live backup forces availability on
            mb.add_row(slot_var("cups", rt.id, t + 1), RowSense::GE, 0.0,
                       {{uc, 1.0}, {up, -1.0}});
            // availability without backup needs the served load to cover
            // the router draw
            {
                const double mcap = rt.rated_kw + load;
                std::vector<Term> terms{{uc, mcap}, {up, -mcap}};
                if (sh >= 0) terms.push_back({sh, 1.0});
                mb.add_row(slot_var("cpow_hi", rt.id, t + 1), RowSense::LE,
                           load - rt.rated_kw + mcap, std::move(terms));
            }
            // schedule-side restatement: grid power implies a cleared cell
            if (node >= 0) {
                const int unc =
                    crew.uNC[std::size_t(
                        cells.cell_of_node[std::size_t(node)])]
                            [std::size_t(t)];
                mb.add_row(slot_var("cgate", rt.id, t + 1), RowSense::LE,
                           0.0, {{uc, 1.0}, {unc, -1.0}, {up, -1.0}});
            } else {
                mb.add_row(slot_var("cgate", rt.id, t + 1), RowSense::LE,
                           0.0, {{uc, 1.0}, {up, -1.0}});
            }
        }
    }

    // ---- remote closing windows and manual/remote merge
    double max_remote = 0.0;
    for (const auto& [sid, dur] : ins.remote_min)
        max_remote = std::max(max_remote, dur);
    const double m_rc = tmax + max_remote +
                        static_cast<double>(slots - 1) * dt + eps;

    std::vector<int> ftu_of_line(ins.lines.size(), -1);
    for (int r = 0; r < nr; ++r)
        if (const int l = ins.routers[std::size_t(r)].rcs_line; l >= 0 &&
            ftu_of_line[std::size_t(l)] < 0)
            ftu_of_line[std::size_t(l)] = r;

    for (std::size_t k = 0; k < crew.clusters.switch_lines.size(); ++k) {
        const int li = crew.clusters.switch_lines[k];
        const core::Line& ln = ins.lines[std::size_t(li)];
        const bool remote = ln.sw == SwitchKind::RCS;
        const int ftu = remote ? ftu_of_line[std::size_t(li)] : -1;
        const double rcso =
            remote ? ins.remote_min.at(ln.switch_id) : 0.0;
        for (int t = 0; t < slots; ++t) {
            const int w = crew.w[k][std::size_t(t)];
            const int wms = crew.wMS[k][std::size_t(t)];
            std::vector<Term> lo{{w, 2.0}, {wms, -1.0}};
            std::vector<Term> hi{{w, 1.0}, {wms, -1.0}};
            if (remote) {
                int wr = mb.add_binary(slot_var("wrcs", ln.switch_id, t + 1),
                                       Stage::First);
                c.wrcs[k][std::size_t(t)] = wr;
                if (ftu < 0) {
                    mb.fix(wr, 0.0);  // no controller drives this switch
                } else {
                    mb.add_row(slot_var("rclose_av", ln.switch_id, t + 1),
                               RowSense::LE, 0.0,
                               {{wr, 1.0},
                                {c.uc[std::size_t(ftu)][std::size_t(t)],
                                 -1.0}});
                    // closable once both sides cleared plus the remote
                    // operation time have elapsed
                    mb.add_row(slot_var("rclose_t", ln.switch_id, t + 1),
                               RowSense::LE,
                               m_rc + static_cast<double>(t) * dt - rcso,
                               {{wr, m_rc}, {crew.tncr_sw[k], 1.0}});
                }
                lo.push_back({wr, -1.0});
                hi.push_back({wr, -1.0});
            }
            mb.add_row(slot_var("merge_lo", ln.switch_id, t + 1),
                       RowSense::GE, 0.0, std::move(lo));
            mb.add_row(slot_var("merge_hi", ln.switch_id, t + 1),
                       RowSense::LE, 0.0, std::move(hi));
        }
    }

    return c;
}

}  // namespace rsched::model
