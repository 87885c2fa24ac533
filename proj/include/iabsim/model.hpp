#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "iabsim/types.hpp"

namespace iabsim {

/// Base station. Donors are fiber-connected sinks; every other node relays
/// uplink traffic toward a donor over the wireless backhaul.
struct IabNode {
    NodeId iab_id = 0;
    NodeId cell_id = 0;  // equals iab_id by default, kept separate
    Position location;
    bool is_donor = false;
    AntennaConfig antenna;
};

struct Ue {
    UeId ue_id = 0;
    Position location;
    NodeId serving_cell = 0;
    double source_rate_bps = 0.0;
};

/// Directed wireless edge. Access links carry UE uplink traffic into a node;
/// backhaul links connect a node's MT to a parent node's DU.
struct Link {
    LinkId path_id = 0;
    std::uint32_t from_id = 0;  // UE id for access links, node id for backhaul
    NodeId to_id = 0;
    LinkKind kind = LinkKind::backhaul;
    Band band = Band::mmwave;
    double sinr_db = 0.0;        // nominal (interference-free) SINR
    double path_rate_bps = 0.0;  // nominal rate at that SINR
    bool path_equipped = true;
};

/// Unit of uplink traffic. `passed_path_list` records every node the packet
/// fully traversed, serving cell first; a delivered packet ends at a donor.
struct Packet {
    PacketId packet_id = 0;
    std::uint64_t packet_size_bits = 0;
    SlotIndex frame_id = 0;  // slot index at generation
    UeId ue_id = 0;
    NodeId cell_id = 0;
    double gen_time_s = 0.0;
    std::optional<double> arrival_time_s;
    std::vector<NodeId> passed_path_list;

    double delay_s() const { return arrival_time_s ? *arrival_time_s - gen_time_s : -1.0; }
};

struct BandParams {
    double carrier_ghz = 28.0;
    double bandwidth_hz = 400e6;
};

/// Full run parameter set. Every field is reachable from the config file and
/// echoed into kpi.json.
struct SimConfig {
    double run_time_s = 0.5;
    double slot_duration_s = 125e-6;
    SimulationMode mode = SimulationMode::run;
    std::uint64_t packet_size_bits = 12000;
    SourceModel source_model = SourceModel::cbr;
    std::optional<double> per_ue_bps;   // exactly one of per_ue_bps /
    std::optional<double> system_bps;   // system_bps may be set
    std::uint64_t buffer_capacity_bytes = 5'000'000;
    std::string scheduler = "round_robin";
    std::string path_policy = "min_hop";
    std::string topology_criterion = "min_hop";
    double max_backhaul_range_m = 500.0;
    Band backhaul_band = Band::mmwave;
    std::vector<LinkId> subthz_link_ids;  // per-link lift to sub-THz
    std::optional<std::string> subthz_trace_file;
    BandParams mmwave{28.0, 400e6};
    BandParams subthz{140.0, 1e9};
    double noise_figure_db = 7.0;
    double tx_power_node_dbm = 30.0;
    double tx_power_ue_dbm = 23.0;
    AntennaConfig node_antenna{64, 16, 0.0};
    AntennaConfig ue_antenna{1, 1, 0.0};
    std::uint64_t seed = 1;

    const BandParams& band(Band b) const { return b == Band::mmwave ? mmwave : subthz; }
    std::uint64_t slot_count() const {
        return static_cast<std::uint64_t>(run_time_s / slot_duration_s + 1e-9);
    }
    /// Source rate for one UE, with a system-wide rate divided equally.
    double ue_rate_bps(std::size_t num_ues) const {
        if (per_ue_bps) return *per_ue_bps;
        if (system_bps && num_ues > 0) return *system_bps / static_cast<double>(num_ues);
        return 0.0;
    }
};

/// Throws ConfigError on non-positive durations/sizes, conflicting source
/// rate settings, or unknown scheduler / path-policy ids.
void validate_config(const SimConfig& config);

constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

/// Immutable deployment graph: nodes, UEs and equipped links, plus derived
/// indexes (children, parents, hop counts, donor-rooted order). Call
/// finalize() once after construction; treat as read-only afterwards.
struct Topology {
    std::vector<IabNode> nodes;
    std::vector<Ue> ues;
    std::vector<Link> links;

    void finalize();

    const IabNode* node(NodeId id) const;
    const Ue* ue(UeId id) const;
    const Link* link(LinkId id) const;

    /// Equipped backhaul links whose transmitter is `id` (its parent links).
    const std::vector<LinkId>& parent_links(NodeId id) const;
    /// Node ids whose equipped parent links point at `id`.
    const std::vector<NodeId>& child_nodes(NodeId id) const;
    /// UE ids attached to `id` via an equipped access link.
    const std::vector<UeId>& attached_ues(NodeId id) const;
    /// Equipped access link of the UE, or nullptr.
    const Link* access_link(UeId id) const;

    /// Hop count to the nearest donor over equipped links (donor = 0,
    /// kUnreachable if none).
    std::uint32_t hops_to_donor(NodeId id) const;
    /// All node ids, donors first, then increasing hop count, ties by id.
    const std::vector<NodeId>& donor_rooted_order() const { return donor_order_; }

    std::size_t donor_count() const;

private:
    std::unordered_map<NodeId, std::size_t> node_index_;
    std::unordered_map<UeId, std::size_t> ue_index_;
    std::unordered_map<LinkId, std::size_t> link_index_;
    std::unordered_map<NodeId, std::vector<LinkId>> parent_links_;
    std::unordered_map<NodeId, std::vector<NodeId>> children_;
    std::unordered_map<NodeId, std::vector<UeId>> attached_;
    std::unordered_map<UeId, LinkId> access_link_;
    std::unordered_map<NodeId, std::uint32_t> hops_;
    std::vector<NodeId> donor_order_;
};

struct ValidationResult {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks every Topology invariant; violations are named data, not failures.
ValidationResult validate_topology(const Topology& topology);

}  // namespace iabsim
