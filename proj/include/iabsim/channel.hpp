#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "iabsim/model.hpp"
#include "iabsim/types.hpp"

namespace iabsim {

/// LOS probability (UMi street canyon, 2D distance in meters).
double los_probability(double d2d_m);

/// Large-scale pathloss in dB. d3d below 1 m is clamped to 1 m.
double pathloss_db(double fc_ghz, double d3d_m, bool los);

/// Two-level codebook pattern: mainlobe 10*log10(elements) within half a
/// beamwidth (360/beams/2 degrees) of the beam center, else a sidelobe floor
/// at mainlobe - 20 dB, never below -10 dBi.
double beam_gain_db(const AntennaConfig& antenna, double angular_offset_deg);

/// Thermal noise power in dBm over the given bandwidth.
double noise_power_dbm(double bandwidth_hz, double noise_figure_db);

/// Shannon rate with the NR spectral-efficiency cap (7.4 b/s/Hz).
double link_rate_bps(double bandwidth_hz, double sinr_db);

/// Endpoint of a radio path: a UE or a node in its transmitter role.
struct TxEndpoint {
    bool is_ue = false;
    std::uint32_t id = 0;
};

/// Large-scale state sampled once per run: per-pair LOS and shadowing for
/// every (transmitter, receiver-node) pair, symmetric across direction.
/// Pathloss is derived, not stored, so one sample serves both bands.
class ChannelState {
public:
    struct PairGain {
        bool los = false;
        double shadowing_db = 0.0;
        double d2d_m = 0.0;
        double d3d_m = 0.0;
    };

    /// Deterministic for a given config seed and entity sets.
    static ChannelState sample(const std::vector<IabNode>& nodes,
                               const std::vector<Ue>& ues, const SimConfig& config);

    const PairGain& pair(const TxEndpoint& tx, NodeId rx) const;
    double pathloss_db_for(const TxEndpoint& tx, NodeId rx, Band band) const;
    double noise_dbm(Band band) const {
        return band == Band::mmwave ? noise_mmwave_dbm_ : noise_subthz_dbm_;
    }

private:
    std::unordered_map<std::uint64_t, PairGain> pairs_;
    double noise_mmwave_dbm_ = 0.0;
    double noise_subthz_dbm_ = 0.0;
    BandParams mmwave_, subthz_;

    static std::uint64_t key(const TxEndpoint& tx, NodeId rx);
};

/// Interference-free SINR of a link, used for topology construction and
/// scheduling decisions. Beams are assumed aligned (mainlobe both ends).
double nominal_sinr_db(const Link& link, const Topology& topology,
                       const ChannelState& state, const SimConfig& config);

/// Same formula evaluated for a candidate pair before any Link exists.
double nominal_pair_sinr_db(const TxEndpoint& tx, const AntennaConfig& tx_antenna,
                            double tx_power_dbm, NodeId rx,
                            const AntennaConfig& rx_antenna, Band band,
                            const ChannelState& state);

/// Realized SINR of `link` given the set of co-scheduled links. Interference
/// sums, in the linear domain, every other active link sharing the band;
/// links transmitted by the receiving node itself are excluded (cross-chain
/// isolation). With no interferer the result is bit-equal to nominal_sinr_db.
double slot_sinr_db(const Link& link, const std::vector<LinkId>& active_links,
                    const Topology& topology, const ChannelState& state,
                    const SimConfig& config);

/// Imported sub-THz SINR traces; lookups wrap modulo the trace length.
class ThzTraceTable {
public:
    /// Parses CSV with header `link_id,slot,sinr_db`. Malformed rows raise
    /// ParseError naming the line.
    static ThzTraceTable parse_csv(const std::string& path);

    /// Raises ConfigError naming the first sub-THz link with no trace row.
    void verify_coverage(const Topology& topology) const;

    bool has_link(LinkId link) const;
    double sinr_db(LinkId link, SlotIndex slot) const;
    std::size_t entry_count() const;
    std::size_t trace_length(LinkId link) const;

private:
    // Per link, SINR values indexed by slot (dense from 0).
    std::unordered_map<LinkId, std::vector<double>> rows_;
};

/// parse_csv + verify_coverage in one step.
ThzTraceTable load_thz_traces(const std::string& path, const Topology& topology);

}  // namespace iabsim
