#include "iabsim/model.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

#include "iabsim/routing.hpp"
#include "iabsim/scheduling.hpp"

namespace iabsim {

std::string to_string(LinkKind k) {
    return k == LinkKind::access ? "access" : "backhaul";
}

std::string to_string(Band b) { return b == Band::mmwave ? "mmwave" : "subthz"; }

std::string to_string(SimulationMode m) {
    return m == SimulationMode::run ? "run" : "debug";
}

std::string to_string(SourceModel m) {
    return m == SourceModel::cbr ? "cbr" : "poisson";
}

void validate_config(const SimConfig& config) {
    if (!(config.run_time_s > 0.0)) throw ConfigError("run_time_s must be > 0");
    if (!(config.slot_duration_s > 0.0))
        throw ConfigError("slot_duration_s must be > 0");
    if (config.packet_size_bits == 0) throw ConfigError("packet_size_bits must be > 0");
    if (config.per_ue_bps && config.system_bps)
        throw ConfigError("set either source.per_ue_bps or source.system_bps, not both");
    if (config.per_ue_bps && *config.per_ue_bps < 0.0)
        throw ConfigError("source.per_ue_bps must be >= 0");
    if (config.system_bps && *config.system_bps < 0.0)
        throw ConfigError("source.system_bps must be >= 0");
    if (config.buffer_capacity_bytes == 0)
        throw ConfigError("buffer_capacity_bytes must be > 0");
    if (!(config.max_backhaul_range_m > 0.0))
        throw ConfigError("max_backhaul_range_m must be > 0");
    for (const BandParams* b : {&config.mmwave, &config.subthz}) {
        if (!(b->carrier_ghz > 0.0)) throw ConfigError("band carrier_ghz must be > 0");
        if (!(b->bandwidth_hz > 0.0)) throw ConfigError("band bandwidth_hz must be > 0");
    }
    for (const AntennaConfig* a : {&config.node_antenna, &config.ue_antenna}) {
        if (a->elements < 1) throw ConfigError("antenna elements must be >= 1");
        if (a->beams < 1) throw ConfigError("antenna beams must be >= 1");
    }
    // These throw ConfigError listing the valid ids.
    check_scheduler_id(config.scheduler);
    path_policy_from_string(config.path_policy);
    topology_criterion_from_string(config.topology_criterion);
}

void Topology::finalize() {
    node_index_.clear();
    ue_index_.clear();
    link_index_.clear();
    parent_links_.clear();
    children_.clear();
    attached_.clear();
    access_link_.clear();
    hops_.clear();
    donor_order_.clear();

    for (std::size_t i = 0; i < nodes.size(); ++i)
        node_index_.emplace(nodes[i].iab_id, i);  // first wins on duplicates
    for (std::size_t i = 0; i < ues.size(); ++i) ue_index_.emplace(ues[i].ue_id, i);
    for (std::size_t i = 0; i < links.size(); ++i)
        link_index_.emplace(links[i].path_id, i);

    for (const Link& l : links) {
        if (!l.path_equipped) continue;
        if (l.kind == LinkKind::backhaul) {
            parent_links_[l.from_id].push_back(l.path_id);
            children_[l.to_id].push_back(l.from_id);
        } else {
            attached_[l.to_id].push_back(l.from_id);
            access_link_.emplace(l.from_id, l.path_id);  // first wins
        }
    }
    for (auto& [id, v] : parent_links_) std::sort(v.begin(), v.end());
    for (auto& [id, v] : children_) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    for (auto& [id, v] : attached_) std::sort(v.begin(), v.end());

    // Hop counts: BFS from the donor set toward children over equipped links.
    std::deque<NodeId> frontier;
    for (const IabNode& n : nodes) {
        if (n.is_donor && !hops_.count(n.iab_id)) {
            hops_[n.iab_id] = 0;
            frontier.push_back(n.iab_id);
        }
    }
    while (!frontier.empty()) {
        NodeId cur = frontier.front();
        frontier.pop_front();
        auto it = children_.find(cur);
        if (it == children_.end()) continue;
        for (NodeId child : it->second) {
            if (!hops_.count(child)) {
                hops_[child] = hops_[cur] + 1;
                frontier.push_back(child);
            }
        }
    }

    donor_order_.reserve(nodes.size());
    for (const IabNode& n : nodes) donor_order_.push_back(n.iab_id);
    std::sort(donor_order_.begin(), donor_order_.end());
    donor_order_.erase(std::unique(donor_order_.begin(), donor_order_.end()),
                       donor_order_.end());
    std::stable_sort(donor_order_.begin(), donor_order_.end(),
                     [this](NodeId a, NodeId b) {
                         return hops_to_donor(a) < hops_to_donor(b);
                     });
}

const IabNode* Topology::node(NodeId id) const {
    auto it = node_index_.find(id);
    return it == node_index_.end() ? nullptr : &nodes[it->second];
}

const Ue* Topology::ue(UeId id) const {
    auto it = ue_index_.find(id);
    return it == ue_index_.end() ? nullptr : &ues[it->second];
}

const Link* Topology::link(LinkId id) const {
    auto it = link_index_.find(id);
    return it == link_index_.end() ? nullptr : &links[it->second];
}

const std::vector<LinkId>& Topology::parent_links(NodeId id) const {
    static const std::vector<LinkId> empty;
    auto it = parent_links_.find(id);
    return it == parent_links_.end() ? empty : it->second;
}

const std::vector<NodeId>& Topology::child_nodes(NodeId id) const {
    static const std::vector<NodeId> empty;
    auto it = children_.find(id);
    return it == children_.end() ? empty : it->second;
}

const std::vector<UeId>& Topology::attached_ues(NodeId id) const {
    static const std::vector<UeId> empty;
    auto it = attached_.find(id);
    return it == attached_.end() ? empty : it->second;
}

const Link* Topology::access_link(UeId id) const {
    auto it = access_link_.find(id);
    return it == access_link_.end() ? nullptr : link(it->second);
}

std::uint32_t Topology::hops_to_donor(NodeId id) const {
    auto it = hops_.find(id);
    return it == hops_.end() ? kUnreachable : it->second;
}

std::size_t Topology::donor_count() const {
    std::size_t n = 0;
    for (const IabNode& node : nodes) n += node.is_donor ? 1 : 0;
    return n;
}

namespace {

// Cycle detection over equipped backhaul edges (Kahn's algorithm).
bool has_backhaul_cycle(const Topology& topo) {
    std::unordered_map<NodeId, std::uint32_t> out_degree;
    std::unordered_map<NodeId, std::vector<NodeId>> rev;  // parent -> children
    std::size_t edge_count = 0;
    for (const Link& l : topo.links) {
        if (l.kind != LinkKind::backhaul || !l.path_equipped) continue;
        ++out_degree[l.from_id];
        rev[l.to_id].push_back(l.from_id);
        ++edge_count;
    }
    if (edge_count == 0) return false;
    std::deque<NodeId> zero;
    for (const IabNode& n : topo.nodes)
        if (out_degree.find(n.iab_id) == out_degree.end()) zero.push_back(n.iab_id);
    std::size_t removed_edges = 0;
    while (!zero.empty()) {
        NodeId cur = zero.front();
        zero.pop_front();
        auto it = rev.find(cur);
        if (it == rev.end()) continue;
        for (NodeId child : it->second) {
            ++removed_edges;
            if (--out_degree[child] == 0) zero.push_back(child);
        }
    }
    return removed_edges != edge_count;
}

}  // namespace

ValidationResult validate_topology(const Topology& topology) {
    ValidationResult result;
    auto flag = [&result](const std::string& v) { result.violations.push_back(v); };

    std::set<NodeId> node_ids;
    bool any_donor = false;
    for (const IabNode& n : topology.nodes) {
        if (!node_ids.insert(n.iab_id).second)
            flag("duplicate node id: " + std::to_string(n.iab_id));
        if (!n.location.finite() || n.location.z_m <= 0.0)
            flag("invalid node position: " + std::to_string(n.iab_id));
        any_donor |= n.is_donor;
    }
    if (topology.nodes.empty() || !any_donor) flag("no donor node");

    std::set<UeId> ue_ids;
    for (const Ue& u : topology.ues) {
        if (!ue_ids.insert(u.ue_id).second)
            flag("duplicate ue id: " + std::to_string(u.ue_id));
        if (!u.location.finite()) flag("invalid ue position: " + std::to_string(u.ue_id));
        if (u.source_rate_bps < 0.0)
            flag("negative source rate on ue: " + std::to_string(u.ue_id));
        if (!topology.node(u.serving_cell))
            flag("ue " + std::to_string(u.ue_id) + " serving cell does not exist: " +
                 std::to_string(u.serving_cell));
    }

    std::set<LinkId> link_ids;
    for (const Link& l : topology.links) {
        if (!link_ids.insert(l.path_id).second)
            flag("duplicate link id: " + std::to_string(l.path_id));
        if (l.path_rate_bps < 0.0)
            flag("negative rate on link: " + std::to_string(l.path_id));
        if (!topology.node(l.to_id))
            flag("link " + std::to_string(l.path_id) + " receiver does not exist");
        if (l.kind == LinkKind::backhaul) {
            if (l.from_id == l.to_id)
                flag("link " + std::to_string(l.path_id) + " loops on one node");
            const IabNode* from = topology.node(l.from_id);
            if (!from)
                flag("link " + std::to_string(l.path_id) + " transmitter does not exist");
            else if (from->is_donor && l.path_equipped)
                flag("donor transmits backhaul: " + std::to_string(l.from_id));
        } else {
            if (!topology.ue(l.from_id))
                flag("access link " + std::to_string(l.path_id) +
                     " transmitter is not a ue");
        }
    }

    if (has_backhaul_cycle(topology)) flag("cycle");

    for (const IabNode& n : topology.nodes) {
        if (n.is_donor) continue;
        if (topology.hops_to_donor(n.iab_id) == kUnreachable)
            flag("unreachable donor: " + std::to_string(n.iab_id));
    }

    for (const Ue& u : topology.ues) {
        std::size_t equipped = 0;
        for (const Link& l : topology.links)
            if (l.kind == LinkKind::access && l.path_equipped && l.from_id == u.ue_id)
                ++equipped;
        if (equipped == 0)
            flag("orphan UE: " + std::to_string(u.ue_id));
        else if (equipped > 1)
            flag("ue " + std::to_string(u.ue_id) + " has multiple access links");
        else {
            const Link* al = topology.access_link(u.ue_id);
            if (al && al->to_id != u.serving_cell)
                flag("ue " + std::to_string(u.ue_id) +
                     " serving cell disagrees with its access link");
        }
    }

    return result;
}

}  // namespace iabsim
