#include "chor/sim.hpp"

#include <nlohmann/json.hpp>

#include <condition_variable>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <thread>

namespace chor {

std::string_view to_string(Outcome o) {
    switch (o) {
    case Outcome::Completed: return "completed";
    case Outcome::Deadlock: return "deadlock";
    case Outcome::StepLimit: return "step-limit";
    }
    return "?";
}

namespace {

nlohmann::json to_json(const Value& v) {
    if (v.is_int()) return v.as_int();
    if (v.is_bool()) return v.as_bool();
    if (v.is_str()) return v.as_str();
    return nullptr;
}

// Queues between units: one data queue per receive port and, for receive
// ports fed by a synchronous sender, a reply queue holding acks.
struct Network {
    std::size_t capacity = 8;
    std::map<std::string, std::deque<Value>> data;
    std::map<std::string, std::size_t> acks;

    bool empty() const {
        for (const auto& [p, q] : data)
            if (!q.empty()) return false;
        for (const auto& [p, n] : acks)
            if (n) return false;
        return true;
    }
};

class Unit {
public:
    Unit(const CompositeSystem& sys, std::size_t index, std::uint64_t seed)
        : sys_(sys), comp_(sys.components[index]), loc_(comp_.initial) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(index)};
        rng_.seed(seq);
        for (const auto& v : comp_.vars) val_.set(v.var.id, v.init);
    }

    const std::string& location() const { return loc_; }
    const Valuation& valuation() const { return val_; }

    bool finished() const { return !waiting_ && comp_.end && *comp_.end == loc_; }

    bool runnable(const Network& net) const {
        if (waiting_) return acks_ready(net);
        return !candidates(net).empty();
    }

    // Performs one action; returns the event for fired transitions.
    std::optional<TraceEvent> step(Network& net) {
        if (waiting_) {
            if (!acks_ready(net)) return std::nullopt;
            for (const auto& r : waiting_on_) --net.acks[r];
            val_ = apply_update(waiting_->update, val_);
            loc_ = waiting_->dst;
            waiting_ = nullptr;
            waiting_on_.clear();
            return std::nullopt;
        }
        auto cands = candidates(net);
        if (cands.empty()) return std::nullopt;
        const Transition* t = cands[rng_() % cands.size()];
        const Port* p = comp_.find_port(t->port);
        TraceEvent ev{0, comp_.id, t->port, Value()};

        if (p->ctype == PortType::Internal) {
            val_ = apply_update(t->update, val_);
            loc_ = t->dst;
        } else if (p->ctype == PortType::Recv) {
            auto& q = net.data[p->id];
            ev.value = q.front();
            q.pop_front();
            if (auto x = p->var_id()) val_.rebind(*x, ev.value);
            if (synchronous_receiver(p->id)) ++net.acks[p->id];
            val_ = apply_update(t->update, val_);
            loc_ = t->dst;
        } else {
            const Interaction* a = interaction_of(p->id);
            ev.value = p->var_id() ? val_.at(*p->var_id()) : Value();
            for (const auto& r : a->receivers) net.data[r].push_back(ev.value);
            if (p->ctype == PortType::SyncSend) {
                waiting_ = t;
                waiting_on_ = a->receivers;
            } else {
                val_ = apply_update(t->update, val_);
                loc_ = t->dst;
            }
        }
        return ev;
    }

private:
    const CompositeSystem& sys_;
    const AtomicComponent& comp_;
    std::mt19937_64 rng_;
    std::string loc_;
    Valuation val_;
    const Transition* waiting_ = nullptr;
    std::vector<std::string> waiting_on_;

    bool acks_ready(const Network& net) const {
        for (const auto& r : waiting_on_) {
            auto it = net.acks.find(r);
            if (it == net.acks.end() || it->second == 0) return false;
        }
        return true;
    }

    const Interaction* interaction_of(const std::string& send) const {
        for (const auto& a : sys_.gamma)
            if (a.send == send) return &a;
        return nullptr;
    }

    bool synchronous_receiver(const std::string& recv) const {
        for (const auto& a : sys_.gamma)
            for (const auto& r : a.receivers)
                if (r == recv) {
                    const Port* s = sys_.find_port(a.send);
                    return s && s->ctype == PortType::SyncSend;
                }
        return false;
    }

    std::vector<const Transition*> candidates(const Network& net) const {
        std::vector<const Transition*> out;
        for (const Transition* t : comp_.outgoing(loc_)) {
            const Port* p = comp_.find_port(t->port);
            if (!p) continue;
            if (p->ctype == PortType::Recv) {
                auto it = net.data.find(p->id);
                if (it == net.data.end() || it->second.empty()) continue;
                if (!eval(t->guard, val_).as_bool()) continue;
                out.push_back(t);
                continue;
            }
            if (!eval(t->guard, val_).as_bool()) continue;
            if (is_send(p->ctype)) {
                const Interaction* a = interaction_of(p->id);
                if (!a) continue;
                if (p->ctype == PortType::AsyncSend) {
                    bool room = true;
                    for (const auto& r : a->receivers) {
                        auto it = net.data.find(r);
                        if (it != net.data.end() && it->second.size() >= net.capacity) room = false;
                    }
                    if (!room) continue;
                }
            }
            out.push_back(t);
        }
        return out;
    }
};

RunResult collect(const CompositeSystem& sys, const std::vector<Unit>& units, const Network& net, bool limit_hit) {
    RunResult r;
    r.units = units.size();
    bool done = net.empty();
    for (std::size_t i = 0; i < units.size(); ++i) {
        r.locations.push_back(units[i].location());
        for (const auto& [k, v] : units[i].valuation()) r.valuation.set(k, v);
        done = done && units[i].finished();
    }
    (void)sys;
    r.outcome = done ? Outcome::Completed : limit_hit ? Outcome::StepLimit : Outcome::Deadlock;
    return r;
}

RunResult run_stepper(const CompositeSystem& sys, const RunOptions& opts) {
    std::vector<Unit> units;
    for (std::size_t i = 0; i < sys.components.size(); ++i) units.emplace_back(sys, i, opts.seed);
    Network net;
    net.capacity = opts.queue_capacity;
    std::vector<TraceEvent> trace;
    // round-robin over runnable units; the seed only picks the first turn
    std::size_t steps = 0, next = units.empty() ? 0 : opts.seed % units.size();
    bool limit_hit = false;
    while (true) {
        std::optional<std::size_t> pick;
        for (std::size_t k = 0; k < units.size(); ++k) {
            std::size_t i = (next + k) % units.size();
            if (units[i].runnable(net)) {
                pick = i;
                break;
            }
        }
        if (!pick) break;
        if (steps >= opts.max_steps) {
            limit_hit = true;
            break;
        }
        ++steps;
        if (auto ev = units[*pick].step(net)) {
            ev->step = steps;
            trace.push_back(std::move(*ev));
        }
        next = (*pick + 1) % units.size();
    }
    RunResult r = collect(sys, units, net, limit_hit);
    r.trace = std::move(trace);
    r.steps = steps;
    return r;
}

RunResult run_threaded(const CompositeSystem& sys, const RunOptions& opts) {
    std::vector<Unit> units;
    for (std::size_t i = 0; i < sys.components.size(); ++i) units.emplace_back(sys, i, opts.seed);
    Network net;
    net.capacity = opts.queue_capacity;
    std::vector<TraceEvent> trace;
    std::size_t steps = 0, idle = 0;
    bool stop = false, limit_hit = false;
    std::mutex m;
    std::condition_variable cv;

    auto body = [&](std::size_t i) {
        std::unique_lock lk(m);
        while (!stop) {
            if (!units[i].runnable(net)) {
                // quiescence: every unit is idle and nothing can move
                if (++idle == units.size()) {
                    stop = true;
                    cv.notify_all();
                    break;
                }
                cv.wait(lk);
                --idle;
                continue;
            }
            if (steps >= opts.max_steps) {
                limit_hit = stop = true;
                cv.notify_all();
                break;
            }
            ++steps;
            if (auto ev = units[i].step(net)) {
                ev->step = steps;
                trace.push_back(std::move(*ev));
            }
            cv.notify_all();
            lk.unlock();
            std::this_thread::yield();
            lk.lock();
        }
    };
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < units.size(); ++i) threads.emplace_back(body, i);
    for (auto& t : threads) t.join();
    RunResult r = collect(sys, units, net, limit_hit);
    r.trace = std::move(trace);
    r.steps = steps;
    return r;
}

} // namespace

std::string RunResult::trace_jsonl() const {
    std::string out;
    for (const auto& e : trace) {
        nlohmann::ordered_json j;
        j["step"] = e.step;
        j["component"] = e.component;
        j["port"] = e.port;
        j["value"] = to_json(e.value);
        out += j.dump() + "\n";
    }
    return out;
}

RunResult run(const CompositeSystem& sys, const RunOptions& opts) {
    if (sys.components.empty()) {
        RunResult r;
        r.outcome = Outcome::Completed;
        return r;
    }
    return opts.threaded ? run_threaded(sys, opts) : run_stepper(sys, opts);
}

} // namespace chor
