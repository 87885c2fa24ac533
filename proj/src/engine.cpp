#include "iabsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "iabsim/rng.hpp"

namespace iabsim {

SimState::SimState(const Topology& topology, const SimConfig& config)
    : traffic_rng(derive_seed(config.seed, "traffic")),
      policy_rng(derive_seed(config.seed, "policy")) {
    const std::uint64_t cap = config.buffer_capacity_bytes;
    for (const IabNode& n : topology.nodes) {
        du_rx_.emplace(n.iab_id,
                       RlcBuffer(BufferRole::du_rx, OwnerKind::node, n.iab_id, cap));
        mt_tx_.emplace(n.iab_id,
                       RlcBuffer(BufferRole::mt_tx, OwnerKind::node, n.iab_id, cap));
    }
    for (const Ue& u : topology.ues) {
        // The UE's uplink queue is its MT-side transmit buffer.
        ue_queues_.emplace(u.ue_id,
                           RlcBuffer(BufferRole::mt_tx, OwnerKind::ue, u.ue_id, cap));
    }
    for (const Link& l : topology.links) {
        if (l.path_equipped) tx_states_.emplace(l.path_id, LinkTxState{l.path_id, {}, 0});
    }
}

RlcBuffer& SimState::ue_queue(UeId id) { return ue_queues_.at(id); }
RlcBuffer& SimState::du_rx(NodeId id) { return du_rx_.at(id); }
RlcBuffer& SimState::mt_tx(NodeId id) { return mt_tx_.at(id); }
LinkTxState& SimState::tx_state(LinkId id) { return tx_states_.at(id); }

TrafficSource::TrafficSource(const Ue& ue, const SimConfig& config, double rate_bps)
    : ue_(ue), packet_size_bits_(config.packet_size_bits), rate_bps_(rate_bps),
      model_(config.source_model) {}

std::vector<Packet> TrafficSource::generate(SlotIndex slot, double slot_duration_s,
                                            PacketId& next_packet_id, RngStream& rng) {
    std::vector<Packet> out;
    if (rate_bps_ <= 0.0) return out;

    auto frame_of = [slot_duration_s](double t) {
        return static_cast<SlotIndex>(std::floor(t / slot_duration_s));
    };
    auto emit = [&](double gen_time) {
        Packet p;
        p.packet_id = next_packet_id++;
        p.packet_size_bits = packet_size_bits_;
        p.gen_time_s = gen_time;
        p.frame_id = frame_of(gen_time);
        p.ue_id = ue_.ue_id;
        p.cell_id = ue_.serving_cell;
        out.push_back(std::move(p));
    };

    if (model_ == SourceModel::cbr) {
        const double interval_s =
            static_cast<double>(packet_size_bits_) / rate_bps_;
        // Phase 0: arrivals at n * interval. The n-th time is recomputed from
        // scratch so no drift accumulates over long runs.
        while (true) {
            const double t = static_cast<double>(next_seq_) * interval_s;
            if (frame_of(t) > slot) break;
            emit(t);
            ++next_seq_;
        }
    } else {
        const double lambda = rate_bps_ / static_cast<double>(packet_size_bits_);
        if (!poisson_primed_) {
            next_arrival_s_ = rng.exponential(lambda);
            poisson_primed_ = true;
        }
        while (frame_of(next_arrival_s_) <= slot) {
            emit(next_arrival_s_);
            next_arrival_s_ += rng.exponential(lambda);
        }
    }
    return out;
}

namespace {

void deliver(Packet& packet, NodeId donor, SlotIndex slot, double slot_duration_s) {
    packet.arrival_time_s = static_cast<double>(slot + 1) * slot_duration_s;
    packet.passed_path_list.push_back(donor);
}

std::string format_line(const char* fmt, ...) {
    char buf[256];
    va_list args;
    va_start(args, fmt);
    vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    return buf;
}

}  // namespace

SimOutput run(const SimConfig& config, const Topology& topology,
              const ThzTraceTable* traces, const RunHooks& hooks) {
    validate_config(config);
    {
        const ValidationResult v = validate_topology(topology);
        if (!v.ok()) {
            std::string msg = "invalid topology:";
            for (const std::string& s : v.violations) msg += " [" + s + "]";
            throw ConfigError(msg);
        }
    }
    bool any_subthz = false;
    for (const Link& l : topology.links)
        any_subthz |= (l.path_equipped && l.band == Band::subthz);
    if (any_subthz) {
        if (!traces)
            throw ConfigError("sub-THz links configured but no trace table loaded");
        traces->verify_coverage(topology);
    }

    const ChannelState channel = ChannelState::sample(topology.nodes, topology.ues, config);
    SimState sim(topology, config);
    auto scheduler = make_scheduler(config.scheduler, topology);
    const PathPolicy policy = path_policy_from_string(config.path_policy);
    const std::uint64_t policy_seed = derive_seed(config.seed, "policy");
    const bool debug = config.mode == SimulationMode::debug;

    const double slot_s = config.slot_duration_s;
    const SlotIndex n_slots = config.slot_count();

    SimOutput out;
    out.run_time_s = static_cast<double>(n_slots) * slot_s;
    out.slots = n_slots;
    out.loads.reserve(topology.nodes.size() * static_cast<std::size_t>(n_slots));

    // UEs in id order pin the RNG draw order for traffic.
    std::vector<const Ue*> ues_sorted;
    for (const Ue& u : topology.ues) ues_sorted.push_back(&u);
    std::sort(ues_sorted.begin(), ues_sorted.end(),
              [](const Ue* a, const Ue* b) { return a->ue_id < b->ue_id; });
    const double ue_rate = config.ue_rate_bps(topology.ues.size());
    std::vector<TrafficSource> sources;
    sources.reserve(ues_sorted.size());
    for (const Ue* u : ues_sorted) sources.emplace_back(*u, config, ue_rate);

    std::vector<PacketRecord>& records = out.packets;
    PacketId next_packet_id = 0;

    // Donor-rooted rank of each node, for the transfer ordering.
    std::map<NodeId, std::size_t> node_rank;
    for (std::size_t i = 0; i < topology.donor_rooted_order().size(); ++i)
        node_rank[topology.donor_rooted_order()[i]] = i;

    for (SlotIndex slot = 0; slot < n_slots; ++slot) {
        const double slot_start = static_cast<double>(slot) * slot_s;

        // Previous slot's radio arrivals become serviceable: drain each DU-RX
        // staging buffer into the node's MT-TX queue, stamping the next hop.
        for (NodeId node_id : topology.donor_rooted_order()) {
            const IabNode* node = topology.node(node_id);
            if (node->is_donor) continue;
            RlcBuffer& du = sim.du_rx(node_id);
            RlcBuffer& mt = sim.mt_tx(node_id);
            while (!du.empty()) {
                QueuedPacket qp = du.pop();
                const auto next = select_next_hop(topology, node_id, qp.packet_id,
                                                  policy, policy_seed);
                if (!next) {
                    records[qp.packet_id].status = PacketStatus::dropped_noroute;
                    if (debug)
                        out.events.push_back(format_line(
                            "slot=%llu drop packet=%llu cause=noroute node=%u",
                            (unsigned long long)slot, (unsigned long long)qp.packet_id,
                            node_id));
                    continue;
                }
                qp.next_hop = topology.link(*next)->to_id;
                if (!mt.enqueue(qp)) {
                    records[qp.packet_id].status = PacketStatus::dropped_overflow;
                    if (debug)
                        out.events.push_back(format_line(
                            "slot=%llu drop packet=%llu cause=overflow node=%u",
                            (unsigned long long)slot, (unsigned long long)qp.packet_id,
                            node_id));
                }
            }
        }

        // Traffic generation into the UE uplink queues.
        for (std::size_t i = 0; i < sources.size(); ++i) {
            std::vector<Packet> pkts =
                sources[i].generate(slot, slot_s, next_packet_id, sim.traffic_rng);
            for (Packet& p : pkts) {
                QueuedPacket qp{p.packet_id, p.packet_size_bits, p.gen_time_s, {}};
                const UeId ue = p.ue_id;
                records.push_back({std::move(p), PacketStatus::inflight});
                if (!sim.ue_queue(ue).enqueue(qp)) {
                    records.back().status = PacketStatus::dropped_overflow;
                    if (debug)
                        out.events.push_back(format_line(
                            "slot=%llu drop packet=%llu cause=overflow ue=%u",
                            (unsigned long long)slot,
                            (unsigned long long)qp.packet_id, ue));
                }
            }
        }

        // TDMA decision for this slot.
        BufferView view;
        view.ue_has_eligible = [&](UeId ue) {
            const RlcBuffer& q = sim.ue_queue(ue);
            return !q.empty() && q.front().gen_time_s < slot_start;
        };
        view.mt_head_target = [&](NodeId node) -> std::optional<NodeId> {
            const RlcBuffer& q = sim.mt_tx(node);
            if (q.empty()) return std::nullopt;
            return q.front().next_hop;
        };
        const SlotSchedule sched = scheduler->schedule_slot(slot, view);
        if (hooks.on_schedule) hooks.on_schedule(sched);

        // Realized SINR and bit budget per active link.
        std::vector<LinkId> active_all;
        active_all.insert(active_all.end(), sched.active_access_links.begin(),
                          sched.active_access_links.end());
        active_all.insert(active_all.end(), sched.active_backhaul_links.begin(),
                          sched.active_backhaul_links.end());
        std::map<LinkId, std::uint64_t> budgets;
        for (LinkId lid : active_all) {
            const Link* l = topology.link(lid);
            double sinr;
            if (l->band == Band::subthz) {
                sinr = traces->sinr_db(lid, slot);
            } else {
                sinr = slot_sinr_db(*l, active_all, topology, channel, config);
            }
            const double rate = link_rate_bps(config.band(l->band).bandwidth_hz, sinr);
            budgets[lid] = static_cast<std::uint64_t>(std::llround(rate * slot_s));
            if (debug)
                out.events.push_back(format_line(
                    "slot=%llu link=%u sinr_db=%.4f budget_bits=%llu",
                    (unsigned long long)slot, lid, sinr,
                    (unsigned long long)budgets[lid]));
        }

        // Transfers: access first, then backhaul, receivers closest to a
        // donor first. Radio arrivals stage in the receiver's DU-RX, so
        // nothing transmitted this slot is forwarded again this slot.
        std::map<NodeId, std::uint64_t> access_bits, backhaul_bits;
        auto by_receiver_rank = [&](LinkId a, LinkId b) {
            const Link* la = topology.link(a);
            const Link* lb = topology.link(b);
            const std::size_t ra = node_rank[la->to_id], rb = node_rank[lb->to_id];
            return ra != rb ? ra < rb : a < b;
        };

        auto receive = [&](const Link& l) {
            return [&, link = &l](const QueuedPacket& qp) {
                PacketRecord& rec = records[qp.packet_id];
                const IabNode* rx = topology.node(link->to_id);
                if (rx->is_donor) {
                    deliver(rec.packet, rx->iab_id, slot, slot_s);
                    rec.status = PacketStatus::delivered;
                    return true;
                }
                if (sim.du_rx(rx->iab_id).enqueue(qp)) {
                    rec.packet.passed_path_list.push_back(rx->iab_id);
                    return true;
                }
                rec.packet.passed_path_list.push_back(rx->iab_id);
                rec.status = PacketStatus::dropped_overflow;
                if (debug)
                    out.events.push_back(format_line(
                        "slot=%llu drop packet=%llu cause=overflow node=%u",
                        (unsigned long long)slot, (unsigned long long)qp.packet_id,
                        rx->iab_id));
                return false;
            };
        };

        std::vector<LinkId> access_order = sched.active_access_links;
        std::sort(access_order.begin(), access_order.end(), by_receiver_rank);
        for (LinkId lid : access_order) {
            const Link* l = topology.link(lid);
            TransferResult r = transfer(
                sim.ue_queue(l->from_id), sim.tx_state(lid), budgets[lid],
                [&](const QueuedPacket& qp) { return qp.gen_time_s < slot_start; },
                receive(*l));
            access_bits[l->to_id] += r.bits_moved;
        }

        std::vector<LinkId> backhaul_order = sched.active_backhaul_links;
        std::sort(backhaul_order.begin(), backhaul_order.end(), by_receiver_rank);
        for (LinkId lid : backhaul_order) {
            const Link* l = topology.link(lid);
            TransferResult r = transfer(
                sim.mt_tx(l->from_id), sim.tx_state(lid), budgets[lid],
                [&](const QueuedPacket& qp) {
                    return qp.next_hop && *qp.next_hop == l->to_id;
                },
                receive(*l));
            backhaul_bits[l->from_id] += r.bits_moved;
            backhaul_bits[l->to_id] += r.bits_moved;
        }

        // Per-node load snapshot after the slot's transfers.
        for (NodeId node_id : topology.donor_rooted_order()) {
            LoadSample s;
            s.node_id = node_id;
            s.slot = slot;
            s.access_bits_served = access_bits.count(node_id) ? access_bits[node_id] : 0;
            s.backhaul_bits_served =
                backhaul_bits.count(node_id) ? backhaul_bits[node_id] : 0;
            s.du_rx_occupancy_bytes = sim.du_rx(node_id).occupancy_bytes();
            s.mt_tx_occupancy_bytes = sim.mt_tx(node_id).occupancy_bytes();
            out.loads.push_back(s);
        }
        if (debug)
            out.events.push_back(format_line(
                "slot=%llu sched access=%zu backhaul=%zu", (unsigned long long)slot,
                sched.active_access_links.size(), sched.active_backhaul_links.size()));
    }

    // End-of-run census; conservation is exact by construction.
    PacketCensus& c = out.census;
    c.generated = records.size();
    for (const PacketRecord& r : records) {
        switch (r.status) {
            case PacketStatus::delivered: ++c.delivered; break;
            case PacketStatus::dropped_overflow: ++c.dropped_overflow; break;
            case PacketStatus::dropped_noroute: ++c.dropped_noroute; break;
            case PacketStatus::inflight: break;
        }
    }
    std::uint64_t buffered = 0;
    for (const auto& [id, q] : sim.ue_queues()) buffered += q.size();
    for (const auto& [id, q] : sim.du_rx_buffers()) buffered += q.size();
    for (const auto& [id, q] : sim.mt_tx_buffers()) buffered += q.size();
    for (const auto& [id, st] : sim.tx_states()) c.inflight_partial += st.head ? 1 : 0;
    c.queued = buffered - c.inflight_partial;

    return out;
}

}  // namespace iabsim
