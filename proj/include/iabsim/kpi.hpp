#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "iabsim/model.hpp"
#include "iabsim/types.hpp"

#include "json.hpp"

namespace iabsim {

enum class PacketStatus { inflight, delivered, dropped_overflow, dropped_noroute };

std::string to_string(PacketStatus s);

/// A packet plus its fate at end of run. `inflight` covers everything still
/// queued or partially transmitted.
struct PacketRecord {
    Packet packet;
    PacketStatus status = PacketStatus::inflight;
};

/// Per-node, per-slot load: bits carried by each chain and buffer backlogs,
/// sampled after the slot's transfers.
struct LoadSample {
    NodeId node_id = 0;
    SlotIndex slot = 0;
    std::uint64_t access_bits_served = 0;
    std::uint64_t backhaul_bits_served = 0;
    double du_rx_occupancy_bytes = 0.0;
    double mt_tx_occupancy_bytes = 0.0;
};

struct DelayStats {
    double mean_s = 0.0;
    double median_s = 0.0;  // nearest-rank
    double p95_s = 0.0;     // nearest-rank
};

/// KPI aggregate for one scope (a UE, a node, or the whole network).
struct KpiReport {
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped_overflow = 0;
    std::uint64_t dropped_noroute = 0;
    std::uint64_t inflight = 0;
    DelayStats delay;            // delivered packets only
    double throughput_bps = 0.0; // delivered bits / run time
    double drop_rate = 0.0;      // dropped / generated, 0 when none generated
};

struct KpiReportSet {
    KpiReport network;
    std::map<UeId, KpiReport> per_ue;    // keyed by UE id
    std::map<NodeId, KpiReport> per_node;  // packets attributed to serving cell
};

/// Aggregates packet traces into all three scopes. Delay statistics cover
/// delivered packets only; drops are reported via drop_rate.
KpiReportSet aggregate(const std::vector<PacketRecord>& packets,
                       const std::vector<LoadSample>& loads, double run_time_s);

nlohmann::ordered_json to_json(const KpiReport& r);
nlohmann::ordered_json to_json(const KpiReportSet& set);

/// Writes packets.csv, load.csv and kpi.json into `dir` (created if absent).
/// Files are written via a temp name and renamed, so a failure leaves no
/// partial file behind. `config_echo` lands under "config" in kpi.json.
void write_traces(const std::string& dir, const std::vector<PacketRecord>& packets,
                  const std::vector<LoadSample>& loads, const KpiReportSet& reports,
                  const nlohmann::ordered_json& config_echo);

}  // namespace iabsim
