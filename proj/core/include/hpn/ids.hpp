#pragma once

#include <cstdint>
#include <functional>
#include <limits>

namespace hpn {

constexpr std::uint32_t npos32 = std::numeric_limits<std::uint32_t>::max();

struct NetId {
    std::uint32_t value = npos32;

    bool valid() const { return value != npos32; }
    friend bool operator==(NetId a, NetId b) { return a.value == b.value; }
    friend bool operator!=(NetId a, NetId b) { return a.value != b.value; }
    friend bool operator<(NetId a, NetId b) { return a.value < b.value; }
};

// Element ids carry their owning net so that fusion members and marking
// entries are self-describing.
struct PlaceId {
    NetId net;
    std::uint32_t index = npos32;

    bool valid() const { return net.valid() && index != npos32; }
    friend bool operator==(PlaceId a, PlaceId b) { return a.net == b.net && a.index == b.index; }
    friend bool operator!=(PlaceId a, PlaceId b) { return !(a == b); }
    friend bool operator<(PlaceId a, PlaceId b)
    {
        return a.net != b.net ? a.net < b.net : a.index < b.index;
    }
};

struct TransitionId {
    NetId net;
    std::uint32_t index = npos32;

    bool valid() const { return net.valid() && index != npos32; }
    friend bool operator==(TransitionId a, TransitionId b)
    {
        return a.net == b.net && a.index == b.index;
    }
    friend bool operator<(TransitionId a, TransitionId b)
    {
        return a.net != b.net ? a.net < b.net : a.index < b.index;
    }
};

struct PageId {
    NetId net;
    std::uint32_t index = npos32;

    bool valid() const { return net.valid() && index != npos32; }
    friend bool operator==(PageId a, PageId b) { return a.net == b.net && a.index == b.index; }
    friend bool operator<(PageId a, PageId b)
    {
        return a.net != b.net ? a.net < b.net : a.index < b.index;
    }
};

} // namespace hpn
