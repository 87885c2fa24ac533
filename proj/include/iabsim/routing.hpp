#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iabsim/channel.hpp"
#include "iabsim/model.hpp"
#include "iabsim/types.hpp"

namespace iabsim {

enum class TopologyCriterion { min_hop, max_sinr };
enum class PathPolicy { min_hop, max_sinr, random };

TopologyCriterion topology_criterion_from_string(const std::string& s);
PathPolicy path_policy_from_string(const std::string& s);
std::vector<std::string> path_policy_ids();

/// Equips every non-donor node with a parent link so that a donor is
/// reachable. Candidates are node pairs within max_backhaul_range_m.
/// min_hop builds a BFS tree from the donor set (nominal-SINR tie-break);
/// max_sinr picks, per node, the strongest neighbor strictly closer to a
/// donor. Link ids are assigned from `first_link_id` in child-id order.
/// Throws ConfigError listing nodes that cannot reach any donor.
std::vector<Link> build_backhaul_topology(const std::vector<IabNode>& nodes,
                                          const ChannelState& channel,
                                          const SimConfig& config,
                                          TopologyCriterion criterion,
                                          LinkId first_link_id = 0);

/// Attaches each UE to the node with the highest nominal access SINR (ties
/// to the lower node id), writes serving_cell, and returns the access links.
std::vector<Link> attach_ues(std::vector<Ue>& ues, const std::vector<IabNode>& nodes,
                             const ChannelState& channel, const SimConfig& config,
                             LinkId first_link_id);

/// Chooses the packet's next hop among the node's equipped parent links.
/// min_hop: fewest hops to a donor (tie: higher nominal SINR); max_sinr:
/// highest nominal SINR; random: uniform, a pure function of
/// (seed, node, packet). Returns nullopt when the node has no parent (the
/// caller drops the packet with cause "no route").
std::optional<LinkId> select_next_hop(const Topology& topology, NodeId node,
                                      PacketId packet, PathPolicy policy,
                                      std::uint64_t policy_seed);

}  // namespace iabsim
