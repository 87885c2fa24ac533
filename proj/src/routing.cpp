#include "iabsim/routing.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <sstream>

#include "iabsim/rng.hpp"

namespace iabsim {

TopologyCriterion topology_criterion_from_string(const std::string& s) {
    if (s == "min_hop") return TopologyCriterion::min_hop;
    if (s == "max_sinr") return TopologyCriterion::max_sinr;
    throw ConfigError("unknown topology_criterion '" + s +
                      "'; valid: min_hop max_sinr");
}

PathPolicy path_policy_from_string(const std::string& s) {
    if (s == "min_hop") return PathPolicy::min_hop;
    if (s == "max_sinr") return PathPolicy::max_sinr;
    if (s == "random") return PathPolicy::random;
    throw ConfigError("unknown path_policy '" + s + "'; valid: min_hop max_sinr random");
}

std::vector<std::string> path_policy_ids() { return {"min_hop", "max_sinr", "random"}; }

namespace {

// Candidate adjacency: node pairs within backhaul range, with the nominal
// SINR of the child -> parent direction.
struct Candidate {
    NodeId parent;
    double sinr_db;
};

std::map<NodeId, std::vector<Candidate>> candidate_map(
    const std::vector<IabNode>& nodes, const ChannelState& channel,
    const SimConfig& config) {
    std::map<NodeId, std::vector<Candidate>> cands;
    for (const IabNode& child : nodes) {
        for (const IabNode& parent : nodes) {
            if (child.iab_id == parent.iab_id) continue;
            if (distance_2d(child.location, parent.location) >
                config.max_backhaul_range_m)
                continue;
            const double sinr = nominal_pair_sinr_db(
                {false, child.iab_id}, child.antenna, config.tx_power_node_dbm,
                parent.iab_id, parent.antenna, config.backhaul_band, channel);
            cands[child.iab_id].push_back({parent.iab_id, sinr});
        }
    }
    for (auto& [id, v] : cands)
        std::sort(v.begin(), v.end(),
                  [](const Candidate& a, const Candidate& b) { return a.parent < b.parent; });
    return cands;
}

// BFS hop distances from the donor set over the candidate adjacency.
std::map<NodeId, std::uint32_t> bfs_hops(
    const std::vector<IabNode>& nodes,
    const std::map<NodeId, std::vector<Candidate>>& cands) {
    std::map<NodeId, std::vector<NodeId>> neighbors;  // undirected view
    for (const auto& [child, v] : cands)
        for (const Candidate& c : v) neighbors[c.parent].push_back(child);

    std::map<NodeId, std::uint32_t> hops;
    std::deque<NodeId> frontier;
    std::vector<NodeId> donors;
    for (const IabNode& n : nodes)
        if (n.is_donor) donors.push_back(n.iab_id);
    std::sort(donors.begin(), donors.end());
    for (NodeId d : donors) {
        hops[d] = 0;
        frontier.push_back(d);
    }
    while (!frontier.empty()) {
        NodeId cur = frontier.front();
        frontier.pop_front();
        auto it = neighbors.find(cur);
        if (it == neighbors.end()) continue;
        for (NodeId next : it->second) {
            if (!hops.count(next)) {
                hops[next] = hops[cur] + 1;
                frontier.push_back(next);
            }
        }
    }
    return hops;
}

}  // namespace

std::vector<Link> build_backhaul_topology(const std::vector<IabNode>& nodes,
                                          const ChannelState& channel,
                                          const SimConfig& config,
                                          TopologyCriterion criterion,
                                          LinkId first_link_id) {
    const auto cands = candidate_map(nodes, channel, config);
    const auto hops = bfs_hops(nodes, cands);

    std::vector<NodeId> unreachable;
    for (const IabNode& n : nodes)
        if (!n.is_donor && !hops.count(n.iab_id)) unreachable.push_back(n.iab_id);
    if (!unreachable.empty()) {
        std::sort(unreachable.begin(), unreachable.end());
        std::ostringstream msg;
        msg << "unreachable node";
        if (unreachable.size() > 1) msg << "s";
        msg << ":";
        for (NodeId id : unreachable) msg << " " << id;
        throw ConfigError(msg.str());
    }

    std::vector<const IabNode*> sorted;
    for (const IabNode& n : nodes) sorted.push_back(&n);
    std::sort(sorted.begin(), sorted.end(),
              [](const IabNode* a, const IabNode* b) { return a->iab_id < b->iab_id; });

    std::vector<Link> links;
    LinkId next_id = first_link_id;
    for (const IabNode* child : sorted) {
        if (child->is_donor) continue;
        const auto& cand = cands.at(child->iab_id);
        const std::uint32_t own_hops = hops.at(child->iab_id);

        // A neighbor is strictly closer to a donor iff it sits at own_hops-1
        // (BFS adjacency), so min_hop (BFS tree, SINR tie-break) and max_sinr
        // (strongest strictly-closer neighbor) select from the same set; both
        // take the highest nominal SINR, ties to the lower parent id.
        (void)criterion;
        const Candidate* best = nullptr;
        for (const Candidate& c : cand) {
            auto hit = hops.find(c.parent);
            if (hit == hops.end() || hit->second + 1 != own_hops) continue;
            if (!best || c.sinr_db > best->sinr_db) best = &c;
        }
        // BFS guarantees a strictly-closer neighbor exists.
        Link l;
        l.path_id = next_id++;
        l.from_id = child->iab_id;
        l.to_id = best->parent;
        l.kind = LinkKind::backhaul;
        l.band = config.backhaul_band;
        l.sinr_db = best->sinr_db;
        l.path_rate_bps = link_rate_bps(config.band(l.band).bandwidth_hz, l.sinr_db);
        l.path_equipped = true;
        links.push_back(l);
    }
    return links;
}

std::vector<Link> attach_ues(std::vector<Ue>& ues, const std::vector<IabNode>& nodes,
                             const ChannelState& channel, const SimConfig& config,
                             LinkId first_link_id) {
    if (nodes.empty()) throw ConfigError("cannot attach UEs: no nodes");

    std::vector<const IabNode*> sorted;
    for (const IabNode& n : nodes) sorted.push_back(&n);
    std::sort(sorted.begin(), sorted.end(),
              [](const IabNode* a, const IabNode* b) { return a->iab_id < b->iab_id; });

    std::vector<Ue*> sorted_ues;
    for (Ue& u : ues) sorted_ues.push_back(&u);
    std::sort(sorted_ues.begin(), sorted_ues.end(),
              [](const Ue* a, const Ue* b) { return a->ue_id < b->ue_id; });

    std::vector<Link> links;
    LinkId next_id = first_link_id;
    for (Ue* u : sorted_ues) {
        const IabNode* best = nullptr;
        double best_sinr = 0.0;
        for (const IabNode* n : sorted) {
            const double sinr = nominal_pair_sinr_db(
                {true, u->ue_id}, config.ue_antenna, config.tx_power_ue_dbm, n->iab_id,
                n->antenna, Band::mmwave, channel);
            // Strict > keeps the lower node id on ties.
            if (!best || sinr > best_sinr) {
                best = n;
                best_sinr = sinr;
            }
        }
        u->serving_cell = best->iab_id;

        Link l;
        l.path_id = next_id++;
        l.from_id = u->ue_id;
        l.to_id = best->iab_id;
        l.kind = LinkKind::access;
        l.band = Band::mmwave;
        l.sinr_db = best_sinr;
        l.path_rate_bps = link_rate_bps(config.mmwave.bandwidth_hz, l.sinr_db);
        l.path_equipped = true;
        links.push_back(l);
    }
    return links;
}

std::optional<LinkId> select_next_hop(const Topology& topology, NodeId node,
                                      PacketId packet, PathPolicy policy,
                                      std::uint64_t policy_seed) {
    const auto& parents = topology.parent_links(node);
    if (parents.empty()) return std::nullopt;
    if (parents.size() == 1) return parents.front();

    switch (policy) {
        case PathPolicy::min_hop: {
            LinkId best = parents.front();
            std::uint32_t best_hops = kUnreachable;
            double best_sinr = -1e300;
            for (LinkId lid : parents) {
                const Link* l = topology.link(lid);
                if (!l) continue;
                const std::uint32_t h = topology.hops_to_donor(l->to_id);
                if (h < best_hops || (h == best_hops && l->sinr_db > best_sinr)) {
                    best = lid;
                    best_hops = h;
                    best_sinr = l->sinr_db;
                }
            }
            return best;
        }
        case PathPolicy::max_sinr: {
            LinkId best = parents.front();
            double best_sinr = -1e300;
            for (LinkId lid : parents) {
                const Link* l = topology.link(lid);
                if (l && l->sinr_db > best_sinr) {
                    best = lid;
                    best_sinr = l->sinr_db;
                }
            }
            return best;
        }
        case PathPolicy::random: {
            // Pure in (seed, node, packet): no stream state to share.
            const std::uint64_t draw = hash_draw(policy_seed, node, packet);
            return parents[draw % parents.size()];
        }
    }
    return parents.front();
}

}  // namespace iabsim
