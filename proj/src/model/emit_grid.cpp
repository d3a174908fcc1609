#include "rsched/model/emit_grid.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace rsched::model {

namespace {

using core::Instance;
using core::Line;
using core::NodeCellGraph;
using core::Source;
using core::SourceKind;
using core::SwitchKind;

std::string nc_name(int cell) { return "nc" + std::to_string(cell); }

// Position of `value` in an ascending vector; the grid layer only looks up
// values the reduction guarantees to be present.
int position_of(const std::vector<int>& v, int value) {
    auto it = std::lower_bound(v.begin(), v.end(), value);
    return static_cast<int>(it - v.begin());
}

}  // namespace

GridRefs emit_grid_operation(const Instance& ins, const NodeCellGraph& cells,
                             const CrewRefs& crew, ModelBuilder& mb) {
    const int nn = static_cast<int>(ins.nodes.size());
    const int nl = static_cast<int>(ins.lines.size());
    const int ns = static_cast<int>(ins.sources.size());
    const int ncell = cells.cell_count();
    const int nedge = static_cast<int>(cells.edges.size());
    const int slots = ins.horizon.slots;
    const double shed_hours = ins.horizon.slot_min / 60.0;

    GridRefs g;
    auto table = [&](int outer) {
        return std::vector<std::vector<int>>(
            static_cast<std::size_t>(outer),
            std::vector<int>(static_cast<std::size_t>(slots), -1));
    };
    g.line_status = table(nl);
    g.shed = table(nn);
    g.volt = table(nn);
    g.flow_p = table(nl);
    g.flow_q = table(nl);
    g.src_p = table(ns);
    g.src_q = table(ns);
    g.res_cap = table(ns);
    g.res_avail = table(ns);
    g.sig_up = table(ns);
    g.sig_dn = table(ns);
    g.root = table(ncell);
    g.tree_flow = table(nedge);

    // ---- line closing status: switch state for switchable lines, repair
    // timeline for plain damaged lines, always closed otherwise
    for (int l = 0; l < nl; ++l) {
        const Line& ln = ins.lines[std::size_t(l)];
        if (ln.sw != SwitchKind::None) {
            int pos = position_of(crew.clusters.switch_lines, l);
            for (int t = 0; t < slots; ++t)
                g.line_status[std::size_t(l)][std::size_t(t)] =
                    crew.w[std::size_t(pos)][std::size_t(t)];
        } else if (ln.damaged) {
            int pos = position_of(ins.fault_lines, l);
            for (int t = 0; t < slots; ++t)
                g.line_status[std::size_t(l)][std::size_t(t)] =
                    crew.uL[std::size_t(pos)][std::size_t(t)];
        }
    }

    // ---- node voltages, sheddable load, and the shed-energy cost
    std::vector<char> loaded(static_cast<std::size_t>(nn), 0);
    double vspan = 0.0;
    {
        double lo = ins.nodes[0].vmin, hi = ins.nodes[0].vmax;
        for (const auto& nd : ins.nodes) {
            lo = std::min(lo, nd.vmin);
            hi = std::max(hi, nd.vmax);
        }
        vspan = hi - lo;
    }
    for (int i = 0; i < nn; ++i)
        for (double v : ins.nodes[std::size_t(i)].load_kw)
            if (v > 0.0) loaded[std::size_t(i)] = 1;

    for (int i = 0; i < nn; ++i) {
        const auto& nd = ins.nodes[std::size_t(i)];
        const int cell = cells.cell_of_node[std::size_t(i)];
        for (int t = 0; t < slots; ++t) {
            g.volt[std::size_t(i)][std::size_t(t)] = mb.add_continuous(
                slot_var("V", nd.id, t + 1), Stage::Second, nd.vmin, nd.vmax);
            if (!loaded[std::size_t(i)]) continue;
            const double load = nd.load_kw[std::size_t(t)];
            int sh = mb.add_continuous(slot_var("shed", nd.id, t + 1),
                                       Stage::Second, 0.0, load);
            g.shed[std::size_t(i)][std::size_t(t)] = sh;
            if (nd.penalty_per_kwh > 0.0)
                mb.add_objective(sh, nd.penalty_per_kwh * shed_hours);
            // load stays shed until the cell is cleared
            if (load > 0.0)
                mb.add_row(slot_var("shedfloor", nd.id, t + 1), RowSense::GE,
                           load,
                           {{sh, 1.0},
                            {crew.uNC[std::size_t(cell)][std::size_t(t)],
                             load}});
        }
    }

    // ---- line flows: status-gated capacity and voltage coupling
    const double volts_per_kw = 1000.0 / ins.nominal_voltage_v;
    for (int l = 0; l < nl; ++l) {
        const Line& ln = ins.lines[std::size_t(l)];
        const double rdrop = ln.r_ohm * volts_per_kw;
        const double xdrop = ln.x_ohm * volts_per_kw;
        for (int t = 0; t < slots; ++t) {
            int fp = mb.add_continuous(slot_var("fP", ln.id, t + 1),
                                       Stage::Second, -ln.p_cap_kw,
                                       ln.p_cap_kw);
            int fq = mb.add_continuous(slot_var("fQ", ln.id, t + 1),
                                       Stage::Second, -ln.q_cap_kvar,
                                       ln.q_cap_kvar);
            g.flow_p[std::size_t(l)][std::size_t(t)] = fp;
            g.flow_q[std::size_t(l)][std::size_t(t)] = fq;
            const int vf = g.volt[std::size_t(ln.from)][std::size_t(t)];
            const int vt = g.volt[std::size_t(ln.to)][std::size_t(t)];
            const int st = g.line_status[std::size_t(l)][std::size_t(t)];
            if (st < 0) {
                // always closed: the drop equation holds outright
                mb.add_row(slot_var("vdrop", ln.id, t + 1), RowSense::EQ, 0.0,
                           {{vf, 1.0},
                            {vt, -1.0},
                            {fp, -rdrop},
                            {fq, -xdrop}});
                continue;
            }
            mb.add_row(slot_var("fcapP_hi", ln.id, t + 1), RowSense::LE, 0.0,
                       {{fp, 1.0}, {st, -ln.p_cap_kw}});
            mb.add_row(slot_var("fcapP_lo", ln.id, t + 1), RowSense::GE, 0.0,
                       {{fp, 1.0}, {st, ln.p_cap_kw}});
            mb.add_row(slot_var("fcapQ_hi", ln.id, t + 1), RowSense::LE, 0.0,
                       {{fq, 1.0}, {st, -ln.q_cap_kvar}});
            mb.add_row(slot_var("fcapQ_lo", ln.id, t + 1), RowSense::GE, 0.0,
                       {{fq, 1.0}, {st, ln.q_cap_kvar}});
            // drop equation relaxes completely while the line is open
            const double mv =
                vspan +
                (ln.r_ohm * ln.p_cap_kw + ln.x_ohm * ln.q_cap_kvar) *
                    volts_per_kw;
            mb.add_row(slot_var("vdrop_hi", ln.id, t + 1), RowSense::LE, mv,
                       {{vf, 1.0},
                        {vt, -1.0},
                        {fp, -rdrop},
                        {fq, -xdrop},
                        {st, mv}});
            mb.add_row(slot_var("vdrop_lo", ln.id, t + 1), RowSense::GE, -mv,
                       {{vf, 1.0},
                        {vt, -1.0},
                        {fp, -rdrop},
                        {fq, -xdrop},
                        {st, -mv}});
        }
    }

    // ---- sources: clearance-gated output, GT ramping, RES deviation domain
    for (int s = 0; s < ns; ++s) {
        const Source& src = ins.sources[std::size_t(s)];
        const int cell = cells.cell_of_node[std::size_t(src.node)];
        const bool uncertain =
            src.kind == SourceKind::RES && src.max_error > 0.0 &&
            src.budget > 0.0;
        double avail_cap = 0.0;  // largest deviation-adjusted RES capacity
        if (src.kind == SourceKind::RES)
            for (double fc : src.p_max_kw)
                avail_cap =
                    std::max(avail_cap, fc * (1.0 + src.max_error));
        std::vector<Term> budget_terms;

        for (int t = 0; t < slots; ++t) {
            const int unc = crew.uNC[std::size_t(cell)][std::size_t(t)];
            const double qmax = src.q_max_kvar[std::size_t(t)];
            int q = mb.add_continuous(slot_var("Q", src.id, t + 1),
                                      Stage::Second, -qmax, qmax);
            g.src_q[std::size_t(s)][std::size_t(t)] = q;
            if (qmax > 0.0) {
                mb.add_row(slot_var("qcap_hi", src.id, t + 1), RowSense::LE,
                           0.0, {{q, 1.0}, {unc, -qmax}});
                mb.add_row(slot_var("qcap_lo", src.id, t + 1), RowSense::GE,
                           0.0, {{q, 1.0}, {unc, qmax}});
            }
            if (src.kind != SourceKind::RES) {
                const double pmax = src.p_max_kw[std::size_t(t)];
                int p = mb.add_continuous(slot_var("P", src.id, t + 1),
                                          Stage::Second, 0.0, pmax);
                g.src_p[std::size_t(s)][std::size_t(t)] = p;
                if (pmax > 0.0)
                    mb.add_row(slot_var("pcap", src.id, t + 1), RowSense::LE,
                               0.0, {{p, 1.0}, {unc, -pmax}});
                continue;
            }
            // RES: capacity follows the forecast plus a budgeted deviation,
            // and becomes available only once the cell is cleared
            const double fc = src.p_max_kw[std::size_t(t)];
            const double hi = fc * (1.0 + src.max_error);
            const double lo = uncertain ? fc * (1.0 - src.max_error) : fc;
            int cap = mb.add_continuous(slot_var("rescap", src.id, t + 1),
                                        Stage::Second, lo,
                                        uncertain ? hi : fc);
            int av = mb.add_continuous(slot_var("avail", src.id, t + 1),
                                       Stage::Second, 0.0, avail_cap);
            int p = mb.add_continuous(slot_var("P", src.id, t + 1),
                                      Stage::Second, 0.0, hi);
            g.res_cap[std::size_t(s)][std::size_t(t)] = cap;
            g.res_avail[std::size_t(s)][std::size_t(t)] = av;
            g.src_p[std::size_t(s)][std::size_t(t)] = p;
            mb.add_row(slot_var("ruse", src.id, t + 1), RowSense::LE, 0.0,
                       {{p, 1.0}, {av, -1.0}});
            mb.add_row(slot_var("ravail_lo", src.id, t + 1), RowSense::GE,
                       -avail_cap,
                       {{av, 1.0}, {cap, -1.0}, {unc, -avail_cap}});
            mb.add_row(slot_var("ravail_hi", src.id, t + 1), RowSense::LE,
                       0.0, {{av, 1.0}, {cap, -1.0}});
            mb.add_row(slot_var("ravail_gate", src.id, t + 1), RowSense::LE,
                       0.0, {{av, 1.0}, {unc, -avail_cap}});
            if (uncertain) {
                int sp = mb.add_continuous(slot_var("sigp", src.id, t + 1),
                                           Stage::Uncertainty, 0.0, 1.0);
                int sm = mb.add_continuous(slot_var("sigm", src.id, t + 1),
                                           Stage::Uncertainty, 0.0, 1.0);
                g.sig_up[std::size_t(s)][std::size_t(t)] = sp;
                g.sig_dn[std::size_t(s)][std::size_t(t)] = sm;
                mb.add_row(slot_var("rdev", src.id, t + 1), RowSense::EQ, fc,
                           {{cap, 1.0},
                            {sp, -src.max_error * fc},
                            {sm, src.max_error * fc}});
                budget_terms.push_back({sp, 1.0});
                budget_terms.push_back({sm, 1.0});
            }
        }
        if (uncertain)
            mb.add_row("budget[" + src.id + "]", RowSense::LE, src.budget,
                       std::move(budget_terms));
        if (src.kind == SourceKind::GT) {
            // usable ramp is the rated ramp scaled by the reserve factor;
            // the unit starts from zero output
            const double up = src.reserve_factor * src.ramp_up_kw;
            const double dn = src.reserve_factor * src.ramp_down_kw;
            for (int t = 0; t < slots; ++t) {
                std::vector<Term> step{
                    {g.src_p[std::size_t(s)][std::size_t(t)], 1.0}};
                if (t > 0)
                    step.push_back(
                        {g.src_p[std::size_t(s)][std::size_t(t - 1)], -1.0});
                mb.add_row(slot_var("ramp_up", src.id, t + 1), RowSense::LE,
                           up, step);
                if (t > 0)
                    mb.add_row(slot_var("ramp_dn", src.id, t + 1),
                               RowSense::GE, -dn, std::move(step));
            }
        }
    }

    // ---- nodal balance (net line inflow + generation + shed = demand);
    // reactive shedding follows the node's own power ratio
    std::vector<std::vector<int>> into(static_cast<std::size_t>(nn));
    std::vector<std::vector<int>> outof(static_cast<std::size_t>(nn));
    for (int l = 0; l < nl; ++l) {
        into[std::size_t(ins.lines[std::size_t(l)].to)].push_back(l);
        outof[std::size_t(ins.lines[std::size_t(l)].from)].push_back(l);
    }
    std::vector<std::vector<int>> gens(static_cast<std::size_t>(nn));
    for (int s = 0; s < ns; ++s)
        gens[std::size_t(ins.sources[std::size_t(s)].node)].push_back(s);

    for (int i = 0; i < nn; ++i) {
        const auto& nd = ins.nodes[std::size_t(i)];
        for (int t = 0; t < slots; ++t) {
            std::vector<Term> pterm, qterm;
            for (int l : into[std::size_t(i)]) {
                pterm.push_back(
                    {g.flow_p[std::size_t(l)][std::size_t(t)], 1.0});
                qterm.push_back(
                    {g.flow_q[std::size_t(l)][std::size_t(t)], 1.0});
            }
            for (int l : outof[std::size_t(i)]) {
                pterm.push_back(
                    {g.flow_p[std::size_t(l)][std::size_t(t)], -1.0});
                qterm.push_back(
                    {g.flow_q[std::size_t(l)][std::size_t(t)], -1.0});
            }
            for (int s : gens[std::size_t(i)]) {
                pterm.push_back(
                    {g.src_p[std::size_t(s)][std::size_t(t)], 1.0});
                qterm.push_back(
                    {g.src_q[std::size_t(s)][std::size_t(t)], 1.0});
            }
            const double load = nd.load_kw[std::size_t(t)];
            const double qload = nd.qload_kvar[std::size_t(t)];
            if (int sh = g.shed[std::size_t(i)][std::size_t(t)]; sh >= 0) {
                pterm.push_back({sh, 1.0});
                if (load > 0.0 && qload != 0.0)
                    qterm.push_back({sh, qload / load});
            }
            if (!pterm.empty())
                mb.add_row(slot_var("balP", nd.id, t + 1), RowSense::EQ, load,
                           std::move(pterm));
            if (!qterm.empty())
                mb.add_row(slot_var("balQ", nd.id, t + 1), RowSense::EQ,
                           qload, std::move(qterm));
        }
    }

    // ---- per-slot pickup limit: newly restored load cannot exceed the
    // frequency-response headroom of cleared distributed sources
    std::vector<double> kappa(static_cast<std::size_t>(ns), 0.0);
    for (int s = 0; s < ns; ++s) {
        const Source& src = ins.sources[std::size_t(s)];
        if (src.kind == SourceKind::Substation) continue;
        double rated = 0.0;
        for (double v : src.p_max_kw) rated = std::max(rated, v);
        kappa[std::size_t(s)] = src.freq_response_rate * rated;
    }
    double base = 0.0;
    for (int i : ins.initially_energized_nodes)
        base += ins.nodes[std::size_t(i)].load_kw[0];
    for (int t = 0; t < slots; ++t) {
        std::vector<Term> terms;
        double rhs = (t == 0) ? base : 0.0;
        for (int i = 0; i < nn; ++i) {
            if (!loaded[std::size_t(i)]) continue;
            terms.push_back({g.shed[std::size_t(i)][std::size_t(t)], -1.0});
            rhs -= ins.nodes[std::size_t(i)].load_kw[std::size_t(t)];
            if (t > 0) {
                terms.push_back(
                    {g.shed[std::size_t(i)][std::size_t(t - 1)], 1.0});
                rhs += ins.nodes[std::size_t(i)].load_kw[std::size_t(t - 1)];
            }
        }
        for (int s = 0; s < ns; ++s) {
            if (kappa[std::size_t(s)] <= 0.0) continue;
            const int cell =
                cells.cell_of_node[std::size_t(ins.sources[std::size_t(s)]
                                                   .node)];
            terms.push_back({crew.uNC[std::size_t(cell)][std::size_t(t)],
                             -kappa[std::size_t(s)]});
        }
        if (!terms.empty())
            mb.add_row("pickup[" + std::to_string(t + 1) + "]", RowSense::LE,
                       rhs, std::move(terms));
    }

    // ---- radiality over the cell graph: a connectivity commodity flows on
    // closed switch edges, every cell is a consumer, flagged roots absorb
    // the slack, and edges-plus-roots must tile the cell count each slot
    const double mtree = static_cast<double>(ncell);
    for (int c = 0; c < ncell; ++c)
        for (int t = 0; t < slots; ++t)
            g.root[std::size_t(c)][std::size_t(t)] =
                mb.add_binary(slot_var("xi", nc_name(c), t + 1),
                              Stage::First);
    for (int e = 0; e < nedge; ++e) {
        const auto& ed = cells.edges[std::size_t(e)];
        const std::string& swid =
            ins.lines[std::size_t(ed.line)].switch_id;
        const int pos = position_of(crew.clusters.switch_lines, ed.line);
        for (int t = 0; t < slots; ++t) {
            int f = mb.add_continuous(slot_var("F", swid, t + 1),
                                      Stage::Second, -mtree, mtree);
            g.tree_flow[std::size_t(e)][std::size_t(t)] = f;
            const int w = crew.w[std::size_t(pos)][std::size_t(t)];
            mb.add_row(slot_var("treecap_hi", swid, t + 1), RowSense::LE,
                       0.0, {{f, 1.0}, {w, -mtree}});
            mb.add_row(slot_var("treecap_lo", swid, t + 1), RowSense::GE,
                       0.0, {{f, 1.0}, {w, mtree}});
        }
    }
    for (int c = 0; c < ncell; ++c) {
        for (int t = 0; t < slots; ++t) {
            std::vector<Term> lo_terms, hi_terms;
            for (int e = 0; e < nedge; ++e) {
                const auto& ed = cells.edges[std::size_t(e)];
                double coef = 0.0;
                if (ed.cell_b == c) coef += 1.0;
                if (ed.cell_a == c) coef -= 1.0;
                if (coef == 0.0) continue;
                int f = g.tree_flow[std::size_t(e)][std::size_t(t)];
                lo_terms.push_back({f, coef});
                hi_terms.push_back({f, coef});
            }
            const int xi = g.root[std::size_t(c)][std::size_t(t)];
            lo_terms.push_back({xi, mtree});
            hi_terms.push_back({xi, -mtree});
            mb.add_row(slot_var("connect_lo", nc_name(c), t + 1),
                       RowSense::GE, 1.0, std::move(lo_terms));
            mb.add_row(slot_var("connect_hi", nc_name(c), t + 1),
                       RowSense::LE, 1.0, std::move(hi_terms));
        }
    }
    for (int t = 0; t < slots; ++t) {
        std::vector<Term> terms;
        for (int e = 0; e < nedge; ++e) {
            const int pos =
                position_of(crew.clusters.switch_lines,
                            cells.edges[std::size_t(e)].line);
            terms.push_back(
                {crew.w[std::size_t(pos)][std::size_t(t)], 1.0});
        }
        for (int c = 0; c < ncell; ++c)
            terms.push_back({g.root[std::size_t(c)][std::size_t(t)], 1.0});
        mb.add_row("forest[" + std::to_string(t + 1) + "]", RowSense::EQ,
                   static_cast<double>(ncell), std::move(terms));
    }
    {
        std::vector<Term> terms;
        for (int c = 0; c < ncell; ++c)
            terms.push_back(
                {g.root[std::size_t(c)][std::size_t(slots - 1)], 1.0});
        mb.add_row("single_root", RowSense::EQ, 1.0, std::move(terms));
    }

    return g;
}

}  // namespace rsched::model
