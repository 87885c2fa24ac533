#include "iabsim/transport.hpp"

#include <cassert>

namespace iabsim {

TransferResult transfer(RlcBuffer& tx_buffer, LinkTxState& tx_state,
                        std::uint64_t budget_bits,
                        const std::function<bool(const QueuedPacket&)>& head_serviceable,
                        const std::function<bool(const QueuedPacket&)>& rx_accept) {
    TransferResult result;

    while (budget_bits > 0 && !tx_buffer.empty()) {
        const QueuedPacket& head = tx_buffer.front();
        if (head_serviceable && !head_serviceable(head)) break;

        std::uint64_t need = head.size_bits;
        if (tx_state.head) {
            // Carry-over only ever applies to the same head packet: the head
            // cannot change while its transmission is in progress.
            assert(*tx_state.head == head.packet_id);
            need = tx_state.residual_bits;
        }

        if (budget_bits >= need) {
            budget_bits -= need;
            result.bits_moved += need;
            tx_state.head.reset();
            tx_state.residual_bits = 0;
            QueuedPacket moved = tx_buffer.pop();
            rx_accept(moved);  // a rejecting receiver tail-drops the packet
            result.completed.push_back(moved);
        } else {
            tx_state.head = head.packet_id;
            tx_state.residual_bits = need - budget_bits;
            result.bits_moved += budget_bits;
            budget_bits = 0;
        }
    }
    return result;
}

}  // namespace iabsim
