#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <vector>

#include "iabsim/types.hpp"

namespace iabsim {

enum class BufferRole { du_rx, mt_tx };
enum class OwnerKind { node, ue };

/// What a buffer actually queues: the packet's identity plus the fields the
/// transport layer needs. Full packet records stay with the engine.
struct QueuedPacket {
    PacketId packet_id = 0;
    std::uint64_t size_bits = 0;
    double gen_time_s = 0.0;
    std::optional<NodeId> next_hop;  // stamped when entering an MT-TX buffer
};

/// FIFO layer-2 queue with byte capacity and tail drop.
class RlcBuffer {
public:
    RlcBuffer() = default;
    RlcBuffer(BufferRole role, OwnerKind owner_kind, std::uint32_t owner_id,
              std::uint64_t capacity_bytes)
        : role_(role), owner_kind_(owner_kind), owner_id_(owner_id),
          capacity_bits_(capacity_bytes * 8) {}

    /// True iff accepted; a full buffer tail-drops and bumps the drop count.
    bool enqueue(const QueuedPacket& p) {
        if (occupancy_bits_ + p.size_bits > capacity_bits_) {
            ++drops_;
            return false;
        }
        queue_.push_back(p);
        occupancy_bits_ += p.size_bits;
        return true;
    }

    const QueuedPacket& front() const { return queue_.front(); }
    QueuedPacket& front() { return queue_.front(); }

    QueuedPacket pop() {
        QueuedPacket p = queue_.front();
        queue_.pop_front();
        occupancy_bits_ -= p.size_bits;
        return p;
    }

    bool empty() const { return queue_.empty(); }
    std::size_t size() const { return queue_.size(); }
    std::uint64_t occupancy_bits() const { return occupancy_bits_; }
    double occupancy_bytes() const { return static_cast<double>(occupancy_bits_) / 8.0; }
    std::uint64_t capacity_bytes() const { return capacity_bits_ / 8; }
    std::uint64_t drop_count() const { return drops_; }
    BufferRole role() const { return role_; }
    OwnerKind owner_kind() const { return owner_kind_; }
    std::uint32_t owner_id() const { return owner_id_; }

    const std::deque<QueuedPacket>& contents() const { return queue_; }

private:
    BufferRole role_ = BufferRole::mt_tx;
    OwnerKind owner_kind_ = OwnerKind::node;
    std::uint32_t owner_id_ = 0;
    std::uint64_t capacity_bits_ = 0;
    std::uint64_t occupancy_bits_ = 0;
    std::uint64_t drops_ = 0;
    std::deque<QueuedPacket> queue_;
};

/// Partial-transmission carry-over of a link's head packet across slots.
struct LinkTxState {
    LinkId link_id = 0;
    std::optional<PacketId> head;
    std::uint64_t residual_bits = 0;  // in (0, size] while head is set
};

struct TransferResult {
    std::vector<QueuedPacket> completed;  // fully transmitted this slot
    std::uint64_t bits_moved = 0;         // includes partial head progress
};

/// Serves one link for one slot. `budget_bits` = rate * slot_duration.
/// Fully transmitted packets are popped and handed to `rx_accept` (which may
/// tail-drop on the receiving buffer); a leftover budget smaller than the
/// head's residual leaves partial state for the link's next active slot.
/// Serving stops at the first head for which `head_serviceable` is false;
/// spare budget after the queue empties is discarded.
TransferResult transfer(RlcBuffer& tx_buffer, LinkTxState& tx_state,
                        std::uint64_t budget_bits,
                        const std::function<bool(const QueuedPacket&)>& head_serviceable,
                        const std::function<bool(const QueuedPacket&)>& rx_accept);

}  // namespace iabsim
