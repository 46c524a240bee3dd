#include "hpn/registry.hpp"

namespace hpn {

SubsystemModel& RuntimeEnv::subsystem(const std::string& path)
{
    std::lock_guard lock(mu_);
    auto it = subsystems_.find(path);
    if (it == subsystems_.end()) {
        auto model = std::make_unique<SubsystemModel>();
        model->path = path;
        it = subsystems_.emplace(path, std::move(model)).first;
    }
    return *it->second;
}

SubsystemModel* RuntimeEnv::find_subsystem(const std::string& path)
{
    std::lock_guard lock(mu_);
    auto it = subsystems_.find(path);
    return it == subsystems_.end() ? nullptr : it->second.get();
}

Channel& RuntimeEnv::channel(const std::string& id)
{
    std::lock_guard lock(mu_);
    auto it = channels_.find(id);
    if (it == channels_.end()) {
        auto chan = std::make_unique<Channel>();
        chan->id = id;
        it = channels_.emplace(id, std::move(chan)).first;
    }
    return *it->second;
}

std::vector<std::string> RuntimeEnv::subsystem_paths() const
{
    std::lock_guard lock(mu_);
    std::vector<std::string> out;
    for (const auto& [path, model] : subsystems_)
        out.push_back(path);
    return out;
}

std::string cond_any(const std::string& a, const std::string& b)
{
    return "any__" + a + "__" + b;
}

std::string cond_not(const std::string& key)
{
    return "not__" + key;
}

std::string chan_id(const std::string& producer_behaviour, const std::string& consumer_behaviour)
{
    return producer_behaviour + ".to." + consumer_behaviour;
}

std::string chan_write_key(const std::string& id)
{
    return "chan." + id + ".write";
}

std::string chan_read_key(const std::string& id)
{
    return "chan." + id + ".read";
}

std::string chan_fresh_key(const std::string& id)
{
    return "chan." + id + ".fresh";
}

std::string tick_key(const std::string& subsystem_path)
{
    return "core.tick." + subsystem_path;
}

std::string subsystem_of(const std::string& behaviour_path)
{
    std::size_t dot = behaviour_path.rfind('.');
    return dot == std::string::npos ? behaviour_path : behaviour_path.substr(0, dot);
}

namespace {

bool starts_with(const std::string& s, const std::string& prefix)
{
    return s.size() > prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
}

// "chan.<producer>.to.<consumer>.<suffix>" -> channel id, or nullopt.
std::optional<std::string> chan_id_of(const std::string& key, const std::string& suffix)
{
    if (!starts_with(key, "chan.") || key.size() <= 5 + suffix.size() + 1)
        return std::nullopt;
    if (key.compare(key.size() - suffix.size() - 1, suffix.size() + 1, "." + suffix) != 0)
        return std::nullopt;
    std::string id = key.substr(5, key.size() - 5 - suffix.size() - 1);
    if (id.find(".to.") == std::string::npos)
        return std::nullopt;
    return id;
}

std::pair<std::string, std::string> chan_endpoints(const std::string& id)
{
    std::size_t sep = id.find(".to.");
    return {id.substr(0, sep), id.substr(sep + 4)};
}

OpBinding make_chan_write(const std::string& id)
{
    auto [producer, consumer] = chan_endpoints(id);
    std::string producer_sub = subsystem_of(producer);
    std::string consumer_sub = subsystem_of(consumer);
    OpBinding b;
    b.subsystem = producer_sub;
    b.fn = [id, producer_sub, consumer_sub](OpCall& call) {
        SubsystemModel& producer_model = call.env.subsystem(producer_sub);
        Channel& chan = call.env.channel(id);
        chan.slot = producer_model.out[consumer_sub]; // deep copy
        chan.slot.fresh = true;
        chan.slot.seq = ++chan.writes;
        call.emit(EventKind::buffer_write, "chan." + id, "seq=" + std::to_string(chan.slot.seq));
    };
    return b;
}

OpBinding make_chan_read(const std::string& id)
{
    auto [producer, consumer] = chan_endpoints(id);
    std::string producer_sub = subsystem_of(producer);
    std::string consumer_sub = subsystem_of(consumer);
    OpBinding b;
    b.subsystem = consumer_sub;
    b.fn = [id, producer_sub, consumer_sub](OpCall& call) {
        SubsystemModel& consumer_model = call.env.subsystem(consumer_sub);
        Channel& chan = call.env.channel(id);
        BufferRecord snapshot = chan.slot;
        chan.slot.fresh = false;
        consumer_model.in[producer_sub] = snapshot;
        call.emit(EventKind::buffer_read, "chan." + id,
                  "seq=" + std::to_string(snapshot.seq) + (snapshot.fresh ? " fresh=1" : " fresh=0"));
    };
    return b;
}

CondBinding make_chan_fresh(const std::string& id)
{
    auto [producer, consumer] = chan_endpoints(id);
    std::string producer_sub = subsystem_of(producer);
    std::string consumer_sub = subsystem_of(consumer);
    CondBinding b;
    b.subsystem = consumer_sub;
    b.fn = [producer_sub, consumer_sub](const CondCall& call) {
        SubsystemModel* m = call.env.find_subsystem(consumer_sub);
        if (!m)
            return false;
        auto it = m->in.find(producer_sub);
        return it != m->in.end() && it->second.fresh;
    };
    return b;
}

OpBinding make_tick(const std::string& subsystem_path)
{
    OpBinding b;
    b.subsystem = subsystem_path;
    b.fn = [subsystem_path](OpCall& call) {
        SubsystemModel& m = call.env.subsystem(subsystem_path);
        ++m.time;
        call.emit(EventKind::time_increment, subsystem_path, "i=" + std::to_string(m.time));
    };
    return b;
}

} // namespace

Registry::Registry()
{
    cond("core.true", [](const CondCall&) { return true; });
    cond("core.false", [](const CondCall&) { return false; });
    cond("core.stop_requested", [](const CondCall& call) { return call.env.stop_requested(); });
    op("core.noop", [](OpCall&) {});
    op("core.stop", [](OpCall& call) { call.env.request_stop(); });

    op_handler([](const std::string& key) -> std::optional<OpBinding> {
        if (auto id = chan_id_of(key, "write"))
            return make_chan_write(*id);
        if (auto id = chan_id_of(key, "read"))
            return make_chan_read(*id);
        return std::nullopt;
    });
    op_handler([](const std::string& key) -> std::optional<OpBinding> {
        if (starts_with(key, "core.tick."))
            return make_tick(key.substr(10));
        return std::nullopt;
    });
    cond_handler([](const std::string& key) -> std::optional<CondBinding> {
        if (auto id = chan_id_of(key, "fresh"))
            return make_chan_fresh(*id);
        return std::nullopt;
    });
}

void Registry::op(const std::string& key, OpFn fn, OpAffinity affinity, const std::string& subsystem)
{
    ops_[key] = OpBinding{std::move(fn), affinity, subsystem};
}

void Registry::cond(const std::string& key, CondFn fn, const std::string& subsystem)
{
    conds_[key] = CondBinding{std::move(fn), subsystem};
}

bool Registry::has_op(const std::string& key) const
{
    if (ops_.count(key))
        return true;
    for (const auto& h : op_handlers_)
        if (h(key))
            return true;
    return false;
}

OpBinding Registry::resolve_op(const std::string& key) const
{
    auto it = ops_.find(key);
    if (it != ops_.end())
        return it->second;
    for (const auto& h : op_handlers_)
        if (auto b = h(key))
            return *b;
    throw config_error("unresolved operation binding '" + key + "'");
}

CondBinding Registry::resolve_cond(const std::string& key) const
{
    if (starts_with(key, "not__")) {
        CondBinding inner = resolve_cond(key.substr(5));
        CondBinding b;
        b.subsystem = inner.subsystem;
        b.fn = [fn = inner.fn](const CondCall& call) { return !fn(call); };
        return b;
    }
    if (starts_with(key, "any__")) {
        std::string rest = key.substr(5);
        std::size_t sep = rest.find("__");
        if (sep == std::string::npos)
            throw config_error("malformed composite condition '" + key + "'");
        CondBinding a = resolve_cond(rest.substr(0, sep));
        CondBinding c = resolve_cond(rest.substr(sep + 2));
        if (!a.subsystem.empty() && !c.subsystem.empty() && a.subsystem != c.subsystem)
            throw config_error("composite condition '" + key + "' spans two subsystems");
        CondBinding b;
        b.subsystem = a.subsystem.empty() ? c.subsystem : a.subsystem;
        b.fn = [fa = a.fn, fc = c.fn](const CondCall& call) { return fa(call) || fc(call); };
        return b;
    }
    auto it = conds_.find(key);
    if (it != conds_.end())
        return it->second;
    for (const auto& h : cond_handlers_)
        if (auto b = h(key))
            return *b;
    throw config_error("unresolved condition binding '" + key + "'");
}

} // namespace hpn
