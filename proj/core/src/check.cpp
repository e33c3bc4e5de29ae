#include "chor/lang.hpp"

namespace chor {

namespace {

class Checker {
public:
    explicit Checker(const SystemDecl& d) : decl_(d), env_(d.type_env()) {}

    Diagnostics run(const Chor& ch) {
        visit(ch);
        return std::move(out_);
    }

private:
    const SystemDecl& decl_;
    TypeEnv env_;
    Diagnostics out_;

    void report(SourceSpan sp, std::string rule, std::string msg) {
        out_.push_back(Diagnostic{sp, std::move(rule), std::move(msg)});
    }

    void check_update(const Update& f, const std::string& owner, SourceSpan sp, const std::string& where) {
        for (const auto& a : f.assignments) {
            if (a.target.owner != owner)
                report(sp, "update-locality",
                       where + " assigns " + a.target.qualified() + " which is not owned by " + owner);
            for (const auto& v : vars_of(a.rhs))
                if (v.owner != owner)
                    report(sp, "update-locality", where + " reads " + v.qualified() + " which is not owned by " + owner);
            try {
                DataType rt = typecheck(a.rhs, env_);
                auto it = env_.find(a.target);
                if (it != env_.end() && it->second != rt)
                    report(sp, "type-error",
                           where + " assigns " + std::string(to_string(rt)) + " to " + a.target.qualified() + " of type " +
                               std::string(to_string(it->second)));
            } catch (const TypeError& e) {
                report(sp, "type-error", where + ": " + e.what());
            }
        }
    }

    void check_send(const GuardedSend& g) {
        const std::string& owner = g.port.owner;
        if (!is_send(g.port.ctype))
            report(g.span, "port-kind",
                   g.port.id + " is used as a sending port but has type " + std::string(to_string(g.port.ctype)));
        for (const auto& v : vars_of(g.guard))
            if (v.owner != owner)
                report(g.span, "guard-locality",
                       "guard of " + g.port.id + " reads " + v.qualified() + " which is not owned by " + owner);
        try {
            DataType gt = typecheck(g.guard, env_);
            if (gt != DataType::Bool)
                report(g.span, "type-error", "guard of " + g.port.id + " has type " + std::string(to_string(gt)));
        } catch (const TypeError& e) {
            report(g.span, "type-error", "guard of " + g.port.id + ": " + e.what());
        }
        check_update(g.update, owner, g.span, "update of " + g.port.id);
    }

    void visit(const Chor& ch) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, Comm>) {
                    check_comm(n, ch->span);
                } else if constexpr (std::is_same_v<T, Branch>) {
                    for (const auto& c : n.conts) {
                        if (c.send.port.owner != n.master)
                            report(c.send.span, "branch-port-ownership",
                                   "continuation port " + c.send.port.id + " is not owned by master " + n.master);
                        check_send(c.send);
                        visit(c.body);
                    }
                } else if constexpr (std::is_same_v<T, Loop>) {
                    check_send(n.cond);
                    visit(n.body);
                } else if constexpr (std::is_same_v<T, Seq>) {
                    visit(n.first);
                    visit(n.second);
                } else if constexpr (std::is_same_v<T, Par>) {
                    CompSet a = participants(n.left), b = participants(n.right);
                    std::string shared;
                    for (const auto& c : decl_.ordered(a))
                        if (b.count(c)) shared += (shared.empty() ? "" : ", ") + c;
                    if (!shared.empty())
                        report(ch->span, "parallel-independence", "parallel operands share components: " + shared);
                    visit(n.left);
                    visit(n.right);
                }
            },
            ch->node);
    }

    void check_comm(const Comm& c, SourceSpan sp) {
        check_send(c.send);
        if (c.dtype != c.send.port.dtype)
            report(sp, "dtype-mismatch",
                   "annotation <" + std::string(to_string(c.dtype)) + "> does not match " + c.send.port.id + " of type " +
                       std::string(to_string(c.send.port.dtype)));
        if (c.rcvs.empty()) report(sp, "empty-receivers", "communication from " + c.send.port.id + " has no receivers");
        CompSet seen;
        for (const auto& r : c.rcvs) {
            if (r.port.ctype != PortType::Recv)
                report(r.span, "port-kind",
                       r.port.id + " is used as a receiving port but has type " + std::string(to_string(r.port.ctype)));
            if (r.port.dtype != c.send.port.dtype)
                report(r.span, "dtype-mismatch",
                       r.port.id + " of type " + std::string(to_string(r.port.dtype)) + " receives from " +
                           c.send.port.id + " of type " + std::string(to_string(c.send.port.dtype)));
            if (r.port.owner == c.send.port.owner)
                report(r.span, "receiver-owners", r.port.id + " belongs to the sending component");
            else if (!seen.insert(r.port.owner).second)
                report(r.span, "receiver-owners", "component " + r.port.owner + " receives twice in one communication");
            check_update(r.update, r.port.owner, r.span, "update of " + r.port.id);
        }
    }
};

} // namespace

Diagnostics check_well_formed(const SystemDecl& decl, const Chor& ch) { return Checker(decl).run(ch); }

} // namespace chor
