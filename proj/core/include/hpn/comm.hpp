#pragma once

#include <string>
#include <vector>

#include "hpn/net.hpp"

namespace hpn {

/// Producer and consumer each run in blocking or non-blocking mode; both
/// non-blocking is the fully asynchronous model.
struct CommModel {
    bool producer_blocking = false;
    bool consumer_blocking = false;

    static CommModel parse(const std::string& word); // async|block_p|block_c|block_pc
    std::string word() const;
    bool fully_async() const { return !producer_blocking && !consumer_blocking; }
};

enum class Composition : std::uint8_t { sequential, parallel };

/// The two half-pages of one channel. A half is invalid when that side of
/// the channel is serviced outside the net (world endpoints).
struct ChannelPages {
    std::string channel; // "<producer_behaviour>.to.<consumer_behaviour>"
    NetId snd;
    NetId rcv;
};

/// Builds the fully asynchronous pair: each half acquires the mutex fusion
/// place, runs its copy/read operation and releases the mutex. The mutex
/// places of both halves form one fusion group holding the single token.
ChannelPages build_async_pair(System& sys, const std::string& producer_behaviour,
                              const std::string& consumer_behaviour,
                              const std::string& write_op, const std::string& read_op);

/// Blocking variants. A blocking consumer waits on a data-ready fusion
/// place filled by the write; a blocking producer waits on an ack fusion
/// place filled by the consumer's read of fresh data.
ChannelPages build_blocking_pair(System& sys, CommModel model, const std::string& producer_behaviour,
                                 const std::string& consumer_behaviour, const std::string& write_op,
                                 const std::string& read_op);

ChannelPages build_channel_pair(System& sys, CommModel model, const std::string& producer_behaviour,
                                const std::string& consumer_behaviour, const std::string& write_op,
                                const std::string& read_op);

/// One-sided halves for channels whose partner lives outside the net (the
/// world's real effectors/receptors). The mutex place stays local.
NetId build_world_snd_half(System& sys, const std::string& producer_behaviour,
                           const std::string& endpoint, const std::string& write_op);
NetId build_world_rcv_half(System& sys, const std::string& consumer_behaviour,
                           const std::string& endpoint, const std::string& read_op);

/// Composes several transfer pages into one page net: sequentially (the
/// transfers happen in declaration order) or in parallel (fork/join). A
/// single page composes to itself.
NetId compose_peers(System& sys, const std::vector<NetId>& pages, Composition mode,
                    const std::string& wrapper_name);

/// Pass-through net used when a behaviour has no peers on one side: a
/// single place that is both input and output, no operations.
NetId build_passthrough(System& sys, const std::string& name);

} // namespace hpn
