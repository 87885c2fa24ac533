#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "iabsim/channel.hpp"
#include "iabsim/kpi.hpp"
#include "iabsim/model.hpp"
#include "iabsim/routing.hpp"
#include "iabsim/scheduling.hpp"
#include "iabsim/transport.hpp"
#include "iabsim/types.hpp"

namespace iabsim {

/// End-of-run packet census. `queued` counts packets resting in some buffer,
/// `inflight_partial` heads with partial transmission progress; both map to
/// status `inflight` in the traces.
struct PacketCensus {
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped_overflow = 0;
    std::uint64_t dropped_noroute = 0;
    std::uint64_t queued = 0;
    std::uint64_t inflight_partial = 0;

    bool conserved() const {
        return generated ==
               delivered + dropped_overflow + dropped_noroute + queued + inflight_partial;
    }
};

struct SimOutput {
    std::vector<PacketRecord> packets;  // indexed by packet_id
    std::vector<LoadSample> loads;
    PacketCensus census;
    double run_time_s = 0.0;
    SlotIndex slots = 0;
    std::vector<std::string> events;  // debug mode only
};

/// Test/diagnostic taps into the slot loop; never affect outputs.
struct RunHooks {
    std::function<void(const SlotSchedule&)> on_schedule;
};

/// Mutable per-run state: buffers, per-link transmission carry-over, the
/// scheduler (owning its cursors), and the named RNG streams.
class SimState {
public:
    SimState(const Topology& topology, const SimConfig& config);

    RlcBuffer& ue_queue(UeId id);
    RlcBuffer& du_rx(NodeId id);
    RlcBuffer& mt_tx(NodeId id);
    LinkTxState& tx_state(LinkId id);

    const std::map<UeId, RlcBuffer>& ue_queues() const { return ue_queues_; }
    const std::map<NodeId, RlcBuffer>& du_rx_buffers() const { return du_rx_; }
    const std::map<NodeId, RlcBuffer>& mt_tx_buffers() const { return mt_tx_; }
    const std::map<LinkId, LinkTxState>& tx_states() const { return tx_states_; }

    RngStream traffic_rng;  // packet arrival processes
    RngStream policy_rng;   // reserved for stateful policies

private:
    std::map<UeId, RlcBuffer> ue_queues_;
    std::map<NodeId, RlcBuffer> du_rx_;
    std::map<NodeId, RlcBuffer> mt_tx_;
    std::map<LinkId, LinkTxState> tx_states_;
};

/// CBR / Poisson uplink source for one UE. Emits the packets whose arrival
/// falls inside the slot's window; CBR is phase 0 (first packet at t = 0).
class TrafficSource {
public:
    TrafficSource(const Ue& ue, const SimConfig& config, double rate_bps);

    /// Packets generated during [slot*T, (slot+1)*T).
    std::vector<Packet> generate(SlotIndex slot, double slot_duration_s,
                                 PacketId& next_packet_id, RngStream& rng);

private:
    const Ue& ue_;
    std::uint64_t packet_size_bits_;
    double rate_bps_;
    SourceModel model_;
    std::uint64_t next_seq_ = 0;   // CBR packet counter
    double next_arrival_s_ = 0.0;  // Poisson clock
    bool poisson_primed_ = false;
};

/// Runs the full slot loop and returns complete traces. Identical seed,
/// config and topology give bit-identical output. Throws ConfigError before
/// slot 0 on invalid config, invalid topology, or missing sub-THz traces.
SimOutput run(const SimConfig& config, const Topology& topology,
              const ThzTraceTable* traces = nullptr, const RunHooks& hooks = {});

}  // namespace iabsim
