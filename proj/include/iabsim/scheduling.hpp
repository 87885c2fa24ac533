#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "iabsim/model.hpp"
#include "iabsim/types.hpp"

namespace iabsim {

enum class ChainState { idle, tx, rx };

std::string to_string(ChainState s);

/// One slot's TDMA decision: which links are active and what each node's two
/// RF chains are doing. The backhaul chain of a node is never both tx and rx.
struct SlotSchedule {
    SlotIndex slot = 0;
    std::vector<LinkId> active_access_links;
    std::vector<LinkId> active_backhaul_links;

    struct NodeChains {
        ChainState access = ChainState::idle;    // rx while serving a UE
        ChainState backhaul = ChainState::idle;  // tx toward parent / rx from child
    };
    std::map<NodeId, NodeChains> chains;

    const NodeChains& of(NodeId id) const {
        static const NodeChains idle_chains{};
        auto it = chains.find(id);
        return it == chains.end() ? idle_chains : it->second;
    }
};

/// Scheduler's read-only window into the engine's buffer state.
struct BufferView {
    /// UE has a pending packet already eligible for service this slot.
    std::function<bool(UeId)> ue_has_eligible;
    /// Next-hop stamp of the head of the node's MT-TX buffer, nullopt if empty.
    std::function<std::optional<NodeId>(NodeId)> mt_head_target;
};

/// Circular round-robin cursor over ids in ascending order. The next pick is
/// the first eligible id strictly after the last grant.
class RoundRobinCursor {
public:
    /// `order` must be sorted ascending and is captured by copy.
    explicit RoundRobinCursor(std::vector<std::uint32_t> order);
    RoundRobinCursor() = default;

    /// Returns the chosen id and advances, or nullopt if nothing is eligible.
    std::optional<std::uint32_t> next(
        const std::function<bool(std::uint32_t)>& eligible);

private:
    std::vector<std::uint32_t> order_;
    std::size_t cursor_ = 0;  // index of the slot AFTER the last grant
};

/// Per-slot link activation under the half-duplex backhaul constraint.
/// Nodes are visited donor-rooted (parents before descendants); a node whose
/// MT was already granted declines to receive. The access chain always runs
/// round-robin across attached UEs; subclasses choose the backhaul child.
class Scheduler {
public:
    explicit Scheduler(const Topology& topology);
    virtual ~Scheduler() = default;

    SlotSchedule schedule_slot(SlotIndex slot, const BufferView& buffers);

protected:
    /// Picks one of `eligible` (non-empty, ascending node ids) as the node's
    /// backhaul grant.
    virtual NodeId choose_backhaul_child(NodeId parent,
                                         const std::vector<NodeId>& eligible) = 0;

    const Topology& topology_;

private:
    std::map<NodeId, RoundRobinCursor> access_cursors_;
};

/// The built-in scheduler: each DU round-robins among its children.
class RoundRobinScheduler final : public Scheduler {
public:
    explicit RoundRobinScheduler(const Topology& topology);

protected:
    NodeId choose_backhaul_child(NodeId parent,
                                 const std::vector<NodeId>& eligible) override;

private:
    std::map<NodeId, RoundRobinCursor> cursors_;
};

/// Greedy alternative: grants the eligible child whose equipped link toward
/// this parent has the highest nominal SINR (ties to the lower node id).
class MaxNominalSinrScheduler final : public Scheduler {
public:
    explicit MaxNominalSinrScheduler(const Topology& topology);

protected:
    NodeId choose_backhaul_child(NodeId parent,
                                 const std::vector<NodeId>& eligible) override;
};

/// Known scheduler ids: the two shipped implementations plus recognized
/// extension slots that error until an implementation is registered.
std::vector<std::string> shipped_scheduler_ids();
std::vector<std::string> reserved_scheduler_ids();

using SchedulerFactory =
    std::function<std::unique_ptr<Scheduler>(const Topology&)>;

/// Registers (or overrides) a scheduler id; used to plug custom policies.
void register_scheduler(const std::string& id, SchedulerFactory factory);

/// Throws ConfigError listing valid ids for unknown or unimplemented ids.
std::unique_ptr<Scheduler> make_scheduler(const std::string& id,
                                          const Topology& topology);

/// Id check only (same errors as make_scheduler, no construction).
void check_scheduler_id(const std::string& id);

struct HalfDuplexAudit {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// ok iff no node is both backhaul-tx and backhaul-rx in the slot.
HalfDuplexAudit audit_half_duplex(const SlotSchedule& schedule,
                                  const Topology& topology);

}  // namespace iabsim
