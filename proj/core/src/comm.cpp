#include "hpn/comm.hpp"

#include "hpn/registry.hpp"

namespace hpn {

CommModel CommModel::parse(const std::string& word)
{
    if (word == "async")
        return CommModel{false, false};
    if (word == "block_p")
        return CommModel{true, false};
    if (word == "block_c")
        return CommModel{false, true};
    if (word == "block_pc")
        return CommModel{true, true};
    throw net_error("unknown communication model '" + word + "' (async|block_p|block_c|block_pc)");
}

std::string CommModel::word() const
{
    if (producer_blocking && consumer_blocking)
        return "block_pc";
    if (producer_blocking)
        return "block_p";
    if (consumer_blocking)
        return "block_c";
    return "async";
}

namespace {

// Shared skeleton of every half: p_in -> t_1 -> p_2[op] -> t_2 -> p_out with
// the mutex held across the operation. Adding further nets may reallocate
// the net table, so halves are addressed by id, never by reference.
NetId begin_half(System& sys, const std::string& net_name, const std::string& op_key)
{
    NetId id = sys.add_net(net_name);
    NetGraph& n = sys.net(id);
    n.add_place("p_in", "", true, false);
    n.add_place("p_2", op_key);
    n.add_place("p_out", "", false, true);
    n.add_place("p_fusion");
    n.add_transition("t_1");
    n.connect("p_in", "t_1");
    n.connect("p_fusion", "t_1");
    n.connect("t_1", "p_2");
    return id;
}

PlaceId pid(const System& sys, NetId id, const std::string& place)
{
    return PlaceId{id, sys.net(id).node(place).index};
}

} // namespace

ChannelPages build_async_pair(System& sys, const std::string& producer_behaviour,
                              const std::string& consumer_behaviour, const std::string& write_op,
                              const std::string& read_op)
{
    if (producer_behaviour == consumer_behaviour)
        throw net_error("channel endpoints must be distinct subsystem behaviours");
    const std::string id = chan_id(producer_behaviour, consumer_behaviour);

    NetId snd = begin_half(sys, id + ".snd", write_op);
    NetId rcv = begin_half(sys, id + ".rcv", read_op);
    for (NetId half : {snd, rcv}) {
        NetGraph& n = sys.net(half);
        n.add_transition("t_2");
        n.connect("p_2", "t_2");
        n.connect("t_2", "p_fusion");
        n.connect("t_2", "p_out");
    }

    sys.fuse(id + ".mutex", {pid(sys, snd, "p_fusion"), pid(sys, rcv, "p_fusion")});
    sys.set_initial(pid(sys, snd, "p_fusion"), 1);

    return ChannelPages{id, snd, rcv};
}

ChannelPages build_blocking_pair(System& sys, CommModel model, const std::string& producer_behaviour,
                                 const std::string& consumer_behaviour, const std::string& write_op,
                                 const std::string& read_op)
{
    if (model.fully_async())
        return build_async_pair(sys, producer_behaviour, consumer_behaviour, write_op, read_op);
    if (producer_behaviour == consumer_behaviour)
        throw net_error("channel endpoints must be distinct subsystem behaviours");
    const std::string id = chan_id(producer_behaviour, consumer_behaviour);

    NetId snd_id = begin_half(sys, id + ".snd", write_op);
    NetId rcv_id = begin_half(sys, id + ".rcv", read_op);
    NetGraph& snd = sys.net(snd_id);
    NetGraph& rcv = sys.net(rcv_id);

    std::vector<std::pair<std::string, std::uint32_t>> fused; // flag place -> initial tokens

    if (model.consumer_blocking) {
        // Complementary availability flags keep the net 1-bounded without
        // conditions: exactly one of p_ready/p_absent holds the token except
        // while the consumer is mid-read (and then it holds the mutex, so
        // the producer cannot be at its release transition).
        snd.add_place("p_ready");
        snd.add_place("p_absent");
        rcv.add_place("p_ready");
        rcv.add_place("p_absent");
        fused.emplace_back("p_ready", 0);
        fused.emplace_back("p_absent", 1);

        // consumer: wait for data atomically with mutex acquisition
        rcv.connect("p_ready", "t_1");
        rcv.add_transition("t_2");
        rcv.connect("p_2", "t_2");
        rcv.connect("t_2", "p_fusion");
        rcv.connect("t_2", "p_absent");
        if (model.producer_blocking) {
            snd.add_place("p_ack");
            rcv.add_place("p_ack");
            fused.emplace_back("p_ack", 0);
            rcv.connect("t_2", "p_ack");
        }
        rcv.connect("t_2", "p_out");

        if (model.producer_blocking) {
            // rendezvous: write, publish ready + wait for the ack the read emits
            snd.add_place("p_wait");
            snd.add_transition("t_2");
            snd.add_transition("t_3");
            snd.connect("p_2", "t_2");
            snd.connect("p_absent", "t_2");
            snd.connect("t_2", "p_fusion");
            snd.connect("t_2", "p_ready");
            snd.connect("t_2", "p_wait");
            snd.connect("p_wait", "t_3");
            snd.connect("p_ack", "t_3");
            snd.connect("t_3", "p_out");
        } else {
            // non-blocking producer: set the flag or leave it set; which
            // release fires is decided by the flag marking itself
            snd.add_transition("t_2a");
            snd.add_transition("t_2b");
            snd.connect("p_2", "t_2a");
            snd.connect("p_absent", "t_2a");
            snd.connect("t_2a", "p_fusion");
            snd.connect("t_2a", "p_ready");
            snd.connect("t_2a", "p_out");
            snd.connect("p_2", "t_2b");
            snd.connect("p_ready", "t_2b");
            snd.connect("t_2b", "p_fusion");
            snd.connect("t_2b", "p_ready");
            snd.connect("t_2b", "p_out");
        }
    } else {
        // blocking producer, non-blocking consumer: the write arms an ack
        // request which only a read of fresh data turns into the ack the
        // producer waits for. Stale reads release without acking.
        snd.add_place("p_wait");
        snd.add_place("p_ack_req");
        snd.add_place("p_ack");
        rcv.add_place("p_ack_req");
        rcv.add_place("p_ack");
        fused.emplace_back("p_ack_req", 0);
        fused.emplace_back("p_ack", 0);

        snd.add_transition("t_2");
        snd.add_transition("t_3");
        snd.connect("p_2", "t_2");
        snd.connect("t_2", "p_fusion");
        snd.connect("t_2", "p_ack_req");
        snd.connect("t_2", "p_wait");
        snd.connect("p_wait", "t_3");
        snd.connect("p_ack", "t_3");
        snd.connect("t_3", "p_out");

        const std::string id_fresh = chan_fresh_key(id);
        rcv.add_transition("t_2", id_fresh);
        rcv.add_transition("t_3", cond_not(id_fresh));
        rcv.connect("p_2", "t_2");
        rcv.connect("p_ack_req", "t_2");
        rcv.connect("t_2", "p_fusion");
        rcv.connect("t_2", "p_ack");
        rcv.connect("t_2", "p_out");
        rcv.connect("p_2", "t_3");
        rcv.connect("t_3", "p_fusion");
        rcv.connect("t_3", "p_out");
    }

    sys.fuse(id + ".mutex", {pid(sys, snd_id, "p_fusion"), pid(sys, rcv_id, "p_fusion")});
    sys.set_initial(pid(sys, snd_id, "p_fusion"), 1);
    for (const auto& [place, tokens] : fused) {
        sys.fuse(id + "." + place.substr(2), {pid(sys, snd_id, place), pid(sys, rcv_id, place)});
        if (tokens)
            sys.set_initial(pid(sys, snd_id, place), tokens);
    }

    return ChannelPages{id, snd_id, rcv_id};
}

ChannelPages build_channel_pair(System& sys, CommModel model, const std::string& producer_behaviour,
                                const std::string& consumer_behaviour, const std::string& write_op,
                                const std::string& read_op)
{
    return model.fully_async()
               ? build_async_pair(sys, producer_behaviour, consumer_behaviour, write_op, read_op)
               : build_blocking_pair(sys, model, producer_behaviour, consumer_behaviour, write_op,
                                     read_op);
}

NetId build_world_snd_half(System& sys, const std::string& producer_behaviour,
                           const std::string& endpoint, const std::string& write_op)
{
    const std::string id = chan_id(producer_behaviour, endpoint);
    NetId snd = begin_half(sys, id + ".snd", write_op);
    NetGraph& n = sys.net(snd);
    n.add_transition("t_2");
    n.connect("p_2", "t_2");
    n.connect("t_2", "p_fusion");
    n.connect("t_2", "p_out");
    sys.set_initial(pid(sys, snd, "p_fusion"), 1);
    return snd;
}

NetId build_world_rcv_half(System& sys, const std::string& consumer_behaviour,
                           const std::string& endpoint, const std::string& read_op)
{
    const std::string id = chan_id(endpoint, consumer_behaviour);
    NetId rcv = begin_half(sys, id + ".rcv", read_op);
    NetGraph& n = sys.net(rcv);
    n.add_transition("t_2");
    n.connect("p_2", "t_2");
    n.connect("t_2", "p_fusion");
    n.connect("t_2", "p_out");
    sys.set_initial(pid(sys, rcv, "p_fusion"), 1);
    return rcv;
}

NetId compose_peers(System& sys, const std::vector<NetId>& pages, Composition mode,
                    const std::string& wrapper_name)
{
    if (pages.empty())
        throw net_error("compose_peers: no pages to compose");
    if (pages.size() == 1)
        return pages.front();

    NetId id = sys.add_net(wrapper_name);
    NetGraph& w = sys.net(id);
    w.add_place("p_in", "", true, false);
    w.add_place("p_out", "", false, true);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < pages.size(); ++i) {
        names.push_back("ch" + std::to_string(i));
        w.add_page(names.back(), pages[i]);
    }

    if (mode == Composition::sequential) {
        // the output place of transfer k feeds transfer k+1
        for (std::size_t i = 0; i + 1 < pages.size(); ++i) {
            w.add_transition("t_" + std::to_string(i + 1));
            w.connect(names[i], "t_" + std::to_string(i + 1));
            w.connect("t_" + std::to_string(i + 1), names[i + 1]);
        }
        w.add_transition("t_0");
        w.connect("p_in", "t_0");
        w.connect("t_0", names.front());
        w.add_transition("t_" + std::to_string(pages.size()));
        w.connect(names.back(), "t_" + std::to_string(pages.size()));
        w.connect("t_" + std::to_string(pages.size()), "p_out");
    } else {
        w.add_transition("t_fork");
        w.add_transition("t_join");
        w.connect("p_in", "t_fork");
        w.connect("t_join", "p_out");
        for (const std::string& name : names) {
            w.connect("t_fork", name);
            w.connect(name, "t_join");
        }
    }
    return id;
}

NetId build_passthrough(System& sys, const std::string& name)
{
    NetId id = sys.add_net(name);
    sys.net(id).add_place("p_io", "", true, true);
    return id;
}

} // namespace hpn
