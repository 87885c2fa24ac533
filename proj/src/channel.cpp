#include "iabsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "iabsim/rng.hpp"

namespace iabsim {

namespace {
constexpr double kSpectralEfficiencyCap = 7.4;  // highest NR MCS, b/s/Hz
constexpr double kShadowSigmaLosDb = 4.0;
constexpr double kShadowSigmaNlosDb = 7.82;
}  // namespace

double los_probability(double d2d_m) {
    if (d2d_m <= 18.0) return 1.0;
    const double e = std::exp(-d2d_m / 36.0);
    return (18.0 / d2d_m) * (1.0 - e) + e;
}

double pathloss_db(double fc_ghz, double d3d_m, bool los) {
    d3d_m = std::max(d3d_m, 1.0);
    const double pl_los = 32.4 + 21.0 * std::log10(d3d_m) + 20.0 * std::log10(fc_ghz);
    if (los) return pl_los;
    const double pl_nlos =
        35.3 * std::log10(d3d_m) + 22.4 + 21.3 * std::log10(fc_ghz);
    return std::max(pl_los, pl_nlos);
}

double beam_gain_db(const AntennaConfig& antenna, double angular_offset_deg) {
    const double mainlobe_db = 10.0 * std::log10(static_cast<double>(antenna.elements));
    const double half_beamwidth_deg = 360.0 / static_cast<double>(antenna.beams) / 2.0;
    if (angular_offset_deg <= half_beamwidth_deg) return mainlobe_db;
    return std::max(mainlobe_db - 20.0, -10.0);
}

double noise_power_dbm(double bandwidth_hz, double noise_figure_db) {
    return -174.0 + noise_figure_db + 10.0 * std::log10(bandwidth_hz);
}

double link_rate_bps(double bandwidth_hz, double sinr_db) {
    const double snr_linear = std::pow(10.0, sinr_db / 10.0);
    const double eff = std::min(std::log2(1.0 + snr_linear), kSpectralEfficiencyCap);
    return bandwidth_hz * eff;
}

std::uint64_t ChannelState::key(const TxEndpoint& tx, NodeId rx) {
    return (static_cast<std::uint64_t>(tx.is_ue ? 1 : 0) << 63) |
           (static_cast<std::uint64_t>(tx.id) << 32) | static_cast<std::uint64_t>(rx);
}

ChannelState ChannelState::sample(const std::vector<IabNode>& nodes,
                                  const std::vector<Ue>& ues,
                                  const SimConfig& config) {
    ChannelState state;
    state.mmwave_ = config.mmwave;
    state.subthz_ = config.subthz;
    state.noise_mmwave_dbm_ =
        noise_power_dbm(config.mmwave.bandwidth_hz, config.noise_figure_db);
    state.noise_subthz_dbm_ =
        noise_power_dbm(config.subthz.bandwidth_hz, config.noise_figure_db);

    // Sorted copies pin the draw order so a seed always yields the same state.
    std::vector<const IabNode*> ns;
    ns.reserve(nodes.size());
    for (const IabNode& n : nodes) ns.push_back(&n);
    std::sort(ns.begin(), ns.end(),
              [](const IabNode* a, const IabNode* b) { return a->iab_id < b->iab_id; });
    std::vector<const Ue*> us;
    us.reserve(ues.size());
    for (const Ue& u : ues) us.push_back(&u);
    std::sort(us.begin(), us.end(),
              [](const Ue* a, const Ue* b) { return a->ue_id < b->ue_id; });

    RngStream rng(derive_seed(config.seed, "channel"));

    auto draw_pair = [&rng](const Position& a, const Position& b) {
        PairGain g;
        g.d2d_m = distance_2d(a, b);
        g.d3d_m = distance_3d(a, b);
        g.los = rng.uniform() < los_probability(g.d2d_m);
        const double sigma = g.los ? kShadowSigmaLosDb : kShadowSigmaNlosDb;
        g.shadowing_db = sigma * rng.normal();
        return g;
    };

    for (const Ue* u : us) {
        for (const IabNode* n : ns) {
            state.pairs_.emplace(key({true, u->ue_id}, n->iab_id),
                                 draw_pair(u->location, n->location));
        }
    }
    // Node pairs are reciprocal: one draw covers both directions.
    for (std::size_t i = 0; i < ns.size(); ++i) {
        for (std::size_t j = i + 1; j < ns.size(); ++j) {
            PairGain g = draw_pair(ns[i]->location, ns[j]->location);
            state.pairs_.emplace(key({false, ns[i]->iab_id}, ns[j]->iab_id), g);
            state.pairs_.emplace(key({false, ns[j]->iab_id}, ns[i]->iab_id), g);
        }
    }
    return state;
}

const ChannelState::PairGain& ChannelState::pair(const TxEndpoint& tx, NodeId rx) const {
    auto it = pairs_.find(key(tx, rx));
    if (it == pairs_.end())
        throw ConfigError("channel state has no entry for pair " +
                          std::to_string(tx.id) + " -> " + std::to_string(rx));
    return it->second;
}

double ChannelState::pathloss_db_for(const TxEndpoint& tx, NodeId rx, Band band) const {
    const PairGain& g = pair(tx, rx);
    const double fc = band == Band::mmwave ? mmwave_.carrier_ghz : subthz_.carrier_ghz;
    return pathloss_db(fc, g.d3d_m, g.los);
}

namespace {

struct LinkGeometry {
    TxEndpoint tx;
    Position tx_pos;
    AntennaConfig tx_antenna;
    double tx_power_dbm = 0.0;
    NodeId rx = 0;
    Position rx_pos;
    AntennaConfig rx_antenna;
};

LinkGeometry link_geometry(const Link& link, const Topology& topo,
                           const SimConfig& config) {
    LinkGeometry g;
    g.rx = link.to_id;
    const IabNode* rx_node = topo.node(link.to_id);
    if (!rx_node) throw ConfigError("link receiver not in topology");
    g.rx_pos = rx_node->location;
    g.rx_antenna = rx_node->antenna;
    if (link.kind == LinkKind::access) {
        const Ue* u = topo.ue(link.from_id);
        if (!u) throw ConfigError("access link transmitter not in topology");
        g.tx = {true, u->ue_id};
        g.tx_pos = u->location;
        g.tx_antenna = config.ue_antenna;
        g.tx_power_dbm = config.tx_power_ue_dbm;
    } else {
        const IabNode* n = topo.node(link.from_id);
        if (!n) throw ConfigError("backhaul link transmitter not in topology");
        g.tx = {false, n->iab_id};
        g.tx_pos = n->location;
        g.tx_antenna = n->antenna;
        g.tx_power_dbm = config.tx_power_node_dbm;
    }
    return g;
}

double rx_power_dbm(const LinkGeometry& g, Band band, const ChannelState& state) {
    const ChannelState::PairGain& pg = state.pair(g.tx, g.rx);
    const double pl = state.pathloss_db_for(g.tx, g.rx, band);
    // Serving beams aligned: mainlobe at both ends.
    const double gt = beam_gain_db(g.tx_antenna, 0.0);
    const double gr = beam_gain_db(g.rx_antenna, 0.0);
    return g.tx_power_dbm + gt + gr - pl - pg.shadowing_db;
}

}  // namespace

double nominal_pair_sinr_db(const TxEndpoint& tx, const AntennaConfig& tx_antenna,
                            double tx_power_dbm, NodeId rx,
                            const AntennaConfig& rx_antenna, Band band,
                            const ChannelState& state) {
    const ChannelState::PairGain& pg = state.pair(tx, rx);
    const double pl = state.pathloss_db_for(tx, rx, band);
    const double gt = beam_gain_db(tx_antenna, 0.0);
    const double gr = beam_gain_db(rx_antenna, 0.0);
    const double signal_dbm = tx_power_dbm + gt + gr - pl - pg.shadowing_db;
    return signal_dbm - state.noise_dbm(band);
}

double nominal_sinr_db(const Link& link, const Topology& topology,
                       const ChannelState& state, const SimConfig& config) {
    const LinkGeometry g = link_geometry(link, topology, config);
    return rx_power_dbm(g, link.band, state) - state.noise_dbm(link.band);
}

double slot_sinr_db(const Link& link, const std::vector<LinkId>& active_links,
                    const Topology& topology, const ChannelState& state,
                    const SimConfig& config) {
    const LinkGeometry victim = link_geometry(link, topology, config);
    const double signal_dbm = rx_power_dbm(victim, link.band, state);

    // Receive beam points at the intended transmitter.
    const double rx_beam_az = azimuth_deg(victim.rx_pos, victim.tx_pos);

    double interference_mw = 0.0;
    bool any_interferer = false;
    for (LinkId other_id : active_links) {
        if (other_id == link.path_id) continue;
        const Link* other = topology.link(other_id);
        if (!other || other->band != link.band) continue;
        const LinkGeometry itf = link_geometry(*other, topology, config);
        // Cross-chain isolation: a node's own transmissions do not jam its
        // other chain's receiver.
        if (!itf.tx.is_ue && itf.tx.id == victim.rx) continue;

        const ChannelState::PairGain& pg = state.pair(itf.tx, victim.rx);
        const double pl = state.pathloss_db_for(itf.tx, victim.rx, link.band);
        // Interfering transmitter keeps its beam on its own receiver.
        const double itf_beam_az = azimuth_deg(itf.tx_pos, itf.rx_pos);
        const double az_to_victim = azimuth_deg(itf.tx_pos, victim.rx_pos);
        const double gt =
            beam_gain_db(itf.tx_antenna, angular_offset_deg(itf_beam_az, az_to_victim));
        const double az_from_victim = azimuth_deg(victim.rx_pos, itf.tx_pos);
        const double gr =
            beam_gain_db(victim.rx_antenna, angular_offset_deg(rx_beam_az, az_from_victim));
        const double p_dbm = itf.tx_power_dbm + gt + gr - pl - pg.shadowing_db;
        interference_mw += std::pow(10.0, p_dbm / 10.0);
        any_interferer = true;
    }

    // No interferer: reduce to the nominal expression so the two operations
    // are bit-equal on the same inputs.
    if (!any_interferer) return signal_dbm - state.noise_dbm(link.band);

    const double noise_mw = std::pow(10.0, state.noise_dbm(link.band) / 10.0);
    const double signal_mw = std::pow(10.0, signal_dbm / 10.0);
    return 10.0 * std::log10(signal_mw / (noise_mw + interference_mw));
}

ThzTraceTable ThzTraceTable::parse_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open trace file: " + path);

    ThzTraceTable table;
    std::string line;
    std::size_t line_no = 0;
    // (link, slot) pairs collected first; slots must form a dense 0..n-1 range.
    std::unordered_map<LinkId, std::unordered_map<SlotIndex, double>> raw;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line != "link_id,slot,sinr_db")
                throw ParseError(path + ":1: expected header link_id,slot,sinr_db");
            continue;
        }
        std::istringstream ss(line);
        std::string a, b, c;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') ||
            !std::getline(ss, c))
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected 3 fields");
        try {
            std::size_t pos = 0;
            const unsigned long link = std::stoul(a, &pos);
            if (pos != a.size()) throw std::invalid_argument(a);
            const unsigned long long slot = std::stoull(b, &pos);
            if (pos != b.size()) throw std::invalid_argument(b);
            const double sinr = std::stod(c, &pos);
            if (pos != c.size()) throw std::invalid_argument(c);
            raw[static_cast<LinkId>(link)][static_cast<SlotIndex>(slot)] = sinr;
        } catch (const std::exception&) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": malformed row '" +
                             line + "'");
        }
    }

    for (auto& [link, slots] : raw) {
        std::vector<double> dense(slots.size(), 0.0);
        for (auto& [slot, sinr] : slots) {
            if (slot >= dense.size())
                throw ParseError(path + ": trace for link " + std::to_string(link) +
                                 " has gaps (slot " + std::to_string(slot) + " of " +
                                 std::to_string(dense.size()) + " rows)");
            dense[slot] = sinr;
        }
        table.rows_.emplace(link, std::move(dense));
    }
    return table;
}

void ThzTraceTable::verify_coverage(const Topology& topology) const {
    for (const Link& l : topology.links) {
        if (l.band != Band::subthz || !l.path_equipped) continue;
        if (!has_link(l.path_id))
            throw ConfigError("no trace for link " + std::to_string(l.path_id));
    }
}

bool ThzTraceTable::has_link(LinkId link) const { return rows_.count(link) > 0; }

double ThzTraceTable::sinr_db(LinkId link, SlotIndex slot) const {
    auto it = rows_.find(link);
    if (it == rows_.end() || it->second.empty())
        throw ConfigError("no trace for link " + std::to_string(link));
    return it->second[slot % it->second.size()];
}

std::size_t ThzTraceTable::entry_count() const {
    std::size_t n = 0;
    for (const auto& [link, v] : rows_) n += v.size();
    return n;
}

std::size_t ThzTraceTable::trace_length(LinkId link) const {
    auto it = rows_.find(link);
    return it == rows_.end() ? 0 : it->second.size();
}

ThzTraceTable load_thz_traces(const std::string& path, const Topology& topology) {
    ThzTraceTable table = ThzTraceTable::parse_csv(path);
    table.verify_coverage(topology);
    return table;
}

}  // namespace iabsim
