#include <string>
#include <vector>

#include "rsched/engine/ccg.hpp"

namespace rsched::engine {

StageIndex index_stages(const model::ModelBuilder& mb) {
    if (!mb.finalized())
        throw model::ModelError("stage index requires a finalized model");
    StageIndex ix;
    const int nv = mb.num_variables();
    ix.x_pos.assign(std::size_t(nv), -1);
    ix.y_pos.assign(std::size_t(nv), -1);
    ix.s_pos.assign(std::size_t(nv), -1);
    for (int v = 0; v < nv; ++v) {
        switch (mb.var(v).stage) {
            case model::Stage::First:
                ix.x_pos[std::size_t(v)] = static_cast<int>(ix.x_vars.size());
                ix.x_vars.push_back(v);
                break;
            case model::Stage::Second:
                ix.y_pos[std::size_t(v)] = static_cast<int>(ix.y_vars.size());
                ix.y_vars.push_back(v);
                break;
            case model::Stage::Uncertainty:
                ix.s_pos[std::size_t(v)] = static_cast<int>(ix.s_vars.size());
                ix.s_vars.push_back(v);
                break;
        }
    }
    for (int r = 0; r < mb.num_rows(); ++r) {
        const model::Row& row = mb.rows()[std::size_t(r)];
        switch (row.family) {
            case model::Family::Scheduling:
                ix.sched_rows.push_back(r);
                break;
            case model::Family::Recourse:
                ix.recourse_rows.push_back(r);
                break;
            case model::Family::Scenario: {
                bool touches_y = false;
                for (const model::Term& t : row.terms)
                    if (ix.y_pos[std::size_t(t.var)] >= 0) touches_y = true;
                (touches_y ? ix.scen_mixed_rows : ix.scen_sigma_rows)
                    .push_back(r);
                break;
            }
        }
    }
    return ix;
}

CompactModel assemble_compact(const core::Instance& ins) {
    CompactModel cm;
    cm.cells = core::reduce_network(ins);
    cm.crew = model::emit_crew_dispatch(ins, cm.cells, cm.mb);
    cm.grid = model::emit_grid_operation(ins, cm.cells, cm.crew, cm.mb);
    cm.cyb = model::emit_cyber_coupling(ins, cm.cells, cm.crew, cm.grid,
                                        cm.mb);
    cm.mb.finalize();
    cm.ix = index_stages(cm.mb);

    // deviation variable metadata, for the worst-case saturation pass
    const int ns = static_cast<int>(cm.ix.s_vars.size());
    cm.smeta.source.assign(std::size_t(ns), -1);
    cm.smeta.slot.assign(std::size_t(ns), -1);
    cm.smeta.down.assign(std::size_t(ns), false);
    for (std::size_t s = 0; s < ins.sources.size(); ++s) {
        cm.smeta.budget_of_source.push_back(ins.sources[s].budget);
        if (cm.grid.sig_up[s].empty()) continue;
        for (int t = 0; t < ins.horizon.slots; ++t) {
            for (const bool dn : {false, true}) {
                const int id = dn ? cm.grid.sig_dn[s][std::size_t(t)]
                                  : cm.grid.sig_up[s][std::size_t(t)];
                if (id < 0) continue;
                const int pos = cm.ix.s_pos[std::size_t(id)];
                if (pos < 0)
                    throw model::ModelError(
                        "deviation variable not tagged as uncertainty: " +
                        cm.mb.var(id).name);
                cm.smeta.source[std::size_t(pos)] = static_cast<int>(s);
                cm.smeta.slot[std::size_t(pos)] = t;
                cm.smeta.down[std::size_t(pos)] = dn;
            }
        }
    }
    for (int j = 0; j < ns; ++j)
        if (cm.smeta.source[std::size_t(j)] < 0)
            throw model::ModelError(
                "uncertainty variable with no source metadata: " +
                cm.mb.var(cm.ix.s_vars[std::size_t(j)]).name);
    return cm;
}

}  // namespace rsched::engine
