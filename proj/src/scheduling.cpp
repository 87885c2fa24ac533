#include "iabsim/scheduling.hpp"

#include <algorithm>
#include <sstream>

namespace iabsim {

std::string to_string(ChainState s) {
    switch (s) {
        case ChainState::idle: return "idle";
        case ChainState::tx: return "tx";
        case ChainState::rx: return "rx";
    }
    return "idle";
}

RoundRobinCursor::RoundRobinCursor(std::vector<std::uint32_t> order)
    : order_(std::move(order)) {}

std::optional<std::uint32_t> RoundRobinCursor::next(
    const std::function<bool(std::uint32_t)>& eligible) {
    const std::size_t n = order_.size();
    for (std::size_t step = 0; step < n; ++step) {
        const std::size_t idx = (cursor_ + step) % n;
        if (eligible(order_[idx])) {
            cursor_ = (idx + 1) % n;
            return order_[idx];
        }
    }
    return std::nullopt;
}

Scheduler::Scheduler(const Topology& topology) : topology_(topology) {
    for (const IabNode& n : topology.nodes) {
        const auto& ues = topology.attached_ues(n.iab_id);
        if (!ues.empty()) access_cursors_.emplace(n.iab_id, RoundRobinCursor(ues));
    }
}

SlotSchedule Scheduler::schedule_slot(SlotIndex slot, const BufferView& buffers) {
    SlotSchedule sched;
    sched.slot = slot;
    for (const IabNode& n : topology_.nodes) sched.chains[n.iab_id] = {};

    // Donor-rooted traversal: parents take their grants before descendants,
    // so a node knows whether its MT was claimed before it offers backhaul-rx.
    for (NodeId node_id : topology_.donor_rooted_order()) {
        auto& chains = sched.chains[node_id];

        // Access chain: round-robin over attached UEs with eligible backlog.
        auto cursor_it = access_cursors_.find(node_id);
        if (cursor_it != access_cursors_.end()) {
            auto pick = cursor_it->second.next(
                [&](UeId ue) { return buffers.ue_has_eligible(ue); });
            if (pick) {
                const Link* al = topology_.access_link(*pick);
                if (al) {
                    sched.active_access_links.push_back(al->path_id);
                    chains.access = ChainState::rx;
                }
            }
        }

        // Backhaul chain: one grant per DU, withheld while this MT transmits.
        if (chains.backhaul == ChainState::tx) continue;

        std::vector<NodeId> eligible;
        for (NodeId child : topology_.child_nodes(node_id)) {
            const auto& child_chains = sched.chains[child];
            if (child_chains.backhaul != ChainState::idle) continue;
            const auto target = buffers.mt_head_target(child);
            if (target && *target == node_id) eligible.push_back(child);
        }
        if (eligible.empty()) continue;

        const NodeId child = choose_backhaul_child(node_id, eligible);
        // The granted link is the child's equipped link toward this parent.
        for (LinkId lid : topology_.parent_links(child)) {
            const Link* l = topology_.link(lid);
            if (l && l->to_id == node_id) {
                sched.active_backhaul_links.push_back(lid);
                sched.chains[child].backhaul = ChainState::tx;
                chains.backhaul = ChainState::rx;
                break;
            }
        }
    }

    std::sort(sched.active_access_links.begin(), sched.active_access_links.end());
    std::sort(sched.active_backhaul_links.begin(), sched.active_backhaul_links.end());
    return sched;
}

RoundRobinScheduler::RoundRobinScheduler(const Topology& topology)
    : Scheduler(topology) {
    for (const IabNode& n : topology.nodes) {
        const auto& children = topology.child_nodes(n.iab_id);
        if (!children.empty()) cursors_.emplace(n.iab_id, RoundRobinCursor(children));
    }
}

NodeId RoundRobinScheduler::choose_backhaul_child(NodeId parent,
                                                  const std::vector<NodeId>& eligible) {
    auto it = cursors_.find(parent);
    auto pick = it->second.next([&](NodeId id) {
        return std::binary_search(eligible.begin(), eligible.end(), id);
    });
    return *pick;  // eligible is non-empty, so the cursor always finds one
}

MaxNominalSinrScheduler::MaxNominalSinrScheduler(const Topology& topology)
    : Scheduler(topology) {}

NodeId MaxNominalSinrScheduler::choose_backhaul_child(
    NodeId parent, const std::vector<NodeId>& eligible) {
    NodeId best = eligible.front();
    double best_sinr = -1e300;
    for (NodeId child : eligible) {
        for (LinkId lid : topology_.parent_links(child)) {
            const Link* l = topology_.link(lid);
            if (l && l->to_id == parent && l->sinr_db > best_sinr) {
                best_sinr = l->sinr_db;
                best = child;
            }
        }
    }
    return best;
}

namespace {

std::map<std::string, SchedulerFactory>& scheduler_registry() {
    static std::map<std::string, SchedulerFactory> registry = {
        {"round_robin",
         [](const Topology& t) { return std::make_unique<RoundRobinScheduler>(t); }},
        {"max_nominal_sinr",
         [](const Topology& t) { return std::make_unique<MaxNominalSinrScheduler>(t); }},
    };
    return registry;
}

std::string valid_ids_message() {
    std::ostringstream msg;
    msg << "valid schedulers:";
    for (const auto& [id, f] : scheduler_registry()) msg << " " << id;
    return msg.str();
}

bool is_reserved(const std::string& id) {
    const auto reserved = reserved_scheduler_ids();
    return std::find(reserved.begin(), reserved.end(), id) != reserved.end();
}

}  // namespace

std::vector<std::string> shipped_scheduler_ids() {
    return {"round_robin", "max_nominal_sinr"};
}

// Policies named by the ecosystem but not shipped; selecting one errors
// until an implementation is registered.
std::vector<std::string> reserved_scheduler_ids() {
    return {"scaros", "mlr", "safehaul", "sinr_based"};
}

void register_scheduler(const std::string& id, SchedulerFactory factory) {
    scheduler_registry()[id] = std::move(factory);
}

void check_scheduler_id(const std::string& id) {
    const auto& registry = scheduler_registry();
    if (registry.count(id)) return;
    if (is_reserved(id))
        throw ConfigError("scheduler '" + id +
                          "' is a recognized extension slot with no registered "
                          "implementation; " +
                          valid_ids_message());
    throw ConfigError("unknown scheduler '" + id + "'; " + valid_ids_message());
}

std::unique_ptr<Scheduler> make_scheduler(const std::string& id,
                                          const Topology& topology) {
    check_scheduler_id(id);
    return scheduler_registry().at(id)(topology);
}

HalfDuplexAudit audit_half_duplex(const SlotSchedule& schedule,
                                  const Topology& topology) {
    HalfDuplexAudit audit;
    std::map<NodeId, int> tx_count, rx_count;
    for (LinkId lid : schedule.active_backhaul_links) {
        const Link* l = topology.link(lid);
        if (!l) continue;
        ++tx_count[l->from_id];
        ++rx_count[l->to_id];
    }
    for (const auto& [node, n_tx] : tx_count) {
        if (n_tx > 1)
            audit.violations.push_back("node " + std::to_string(node) +
                                       " transmits on multiple backhaul links");
        if (rx_count.count(node))
            audit.violations.push_back("node " + std::to_string(node) +
                                       " is both backhaul tx and rx");
    }
    for (const auto& [node, n_rx] : rx_count) {
        if (n_rx > 1)
            audit.violations.push_back("node " + std::to_string(node) +
                                       " receives on multiple backhaul links");
    }
    return audit;
}

}  // namespace iabsim
