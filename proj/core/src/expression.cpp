#include "odekit/expr/expression.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "odekit/algebra.hpp"

namespace odekit::expr {

namespace {

constexpr std::size_t block = 256;

expression make(op_code code, std::shared_ptr<const node> lhs = {},
                std::shared_ptr<const node> rhs = {}) {
    auto n = std::make_shared<node>();
    n->code = code;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return expression(std::move(n));
}

std::size_t clamp_index(std::ptrdiff_t j, std::size_t n) {
    if (j < 0) return 0;
    if (static_cast<std::size_t>(j) >= n) return n - 1;
    return static_cast<std::size_t>(j);
}

scalar eval_node(const node& n, argument_list args, std::size_t i) {
    switch (n.code) {
        case op_code::arg: return args[n.slot][i];
        case op_code::shift: {
            const auto& v = args[n.slot];
            return v[clamp_index(static_cast<std::ptrdiff_t>(i) + n.offset, v.size())];
        }
        case op_code::constant: return n.value;
        case op_code::negate: return -eval_node(*n.lhs, args, i);
        case op_code::sin: return std::sin(eval_node(*n.lhs, args, i));
        case op_code::pow3: {
            const scalar v = eval_node(*n.lhs, args, i);
            return v * v * v;
        }
        case op_code::add: {
            const scalar a = eval_node(*n.lhs, args, i);
            return a + eval_node(*n.rhs, args, i);
        }
        case op_code::sub: {
            const scalar a = eval_node(*n.lhs, args, i);
            return a - eval_node(*n.rhs, args, i);
        }
        case op_code::mul: {
            const scalar a = eval_node(*n.lhs, args, i);
            return a * eval_node(*n.rhs, args, i);
        }
    }
    return 0;
}

void collect(const node& n, std::set<std::size_t>& reads, std::set<std::size_t>& shifted) {
    if (n.code == op_code::arg) reads.insert(n.slot);
    if (n.code == op_code::shift) {
        reads.insert(n.slot);
        shifted.insert(n.slot);
    }
    if (n.lhs) collect(*n.lhs, reads, shifted);
    if (n.rhs) collect(*n.rhs, reads, shifted);
}

bool overlaps(const scalar* a, std::size_t na, const scalar* b, std::size_t nb) {
    if (na == 0 || nb == 0) return false;
    return a < b + nb && b < a + na;
}

}  // namespace

expression arg(std::size_t slot) {
    auto n = std::make_shared<node>();
    n->code = op_code::arg;
    n->slot = slot;
    return expression(std::move(n));
}

expression shift(std::size_t slot, std::ptrdiff_t offset) {
    auto n = std::make_shared<node>();
    n->code = op_code::shift;
    n->slot = slot;
    n->offset = offset;
    return expression(std::move(n));
}

expression constant(scalar value) {
    auto n = std::make_shared<node>();
    n->code = op_code::constant;
    n->value = value;
    return expression(std::move(n));
}

expression operator-(const expression& a) { return make(op_code::negate, a.ptr()); }
expression sin(const expression& a) { return make(op_code::sin, a.ptr()); }
expression pow3(const expression& a) { return make(op_code::pow3, a.ptr()); }

expression operator+(const expression& a, const expression& b) { return make(op_code::add, a.ptr(), b.ptr()); }
expression operator-(const expression& a, const expression& b) { return make(op_code::sub, a.ptr(), b.ptr()); }
expression operator*(const expression& a, const expression& b) { return make(op_code::mul, a.ptr(), b.ptr()); }
expression operator+(scalar a, const expression& b) { return constant(a) + b; }
expression operator+(const expression& a, scalar b) { return a + constant(b); }
expression operator-(scalar a, const expression& b) { return constant(a) - b; }
expression operator-(const expression& a, scalar b) { return a - constant(b); }
expression operator*(scalar a, const expression& b) { return constant(a) * b; }
expression operator*(const expression& a, scalar b) { return a * constant(b); }

scalar evaluate(const expression& e, argument_list args, std::size_t i) {
    return eval_node(e.root(), args, i);
}

std::size_t arity(const expression& e) {
    std::set<std::size_t> reads, shifted;
    collect(e.root(), reads, shifted);
    return reads.empty() ? 0 : *reads.rbegin() + 1;
}

program::program(std::vector<statement> statements) {
    for (auto& st : statements) {
        tape t;
        t.target = st.target;
        emit(t, st.value.root());
        std::set<std::size_t> reads, shifted;
        collect(st.value.root(), reads, shifted);
        t.reads.assign(reads.begin(), reads.end());
        t.shifted.assign(shifted.begin(), shifted.end());
        if (!reads.empty()) m_arg_count = std::max(m_arg_count, *reads.rbegin() + 1);
        m_target_count = std::max(m_target_count, st.target + 1);
        m_tapes.push_back(std::move(t));
    }
}

// Post-order flattening; operands always precede their users.
std::uint32_t program::emit(tape& t, const node& n) {
    instruction ins{n.code};
    ins.slot = n.slot;
    ins.offset = n.offset;
    ins.value = n.value;
    if (n.lhs) ins.a = emit(t, *n.lhs);
    if (n.rhs) ins.b = emit(t, *n.rhs);
    t.code.push_back(ins);
    return static_cast<std::uint32_t>(t.code.size() - 1);
}

void program::run(std::size_t first, std::size_t last,
                  std::span<const std::span<const scalar>> args,
                  std::span<const std::span<scalar>> targets, std::size_t n, std::size_t begin,
                  std::size_t end) const {
    std::size_t longest = 0;
    for (std::size_t s = first; s < last; ++s) longest = std::max(longest, m_tapes[s].code.size());

    thread_local std::vector<scalar> scratch;
    thread_local std::vector<const scalar*> values;
    if (scratch.size() < longest * block) scratch.resize(longest * block);
    if (values.size() < longest) values.resize(longest);

    for (std::size_t b = begin; b < end; b += block) {
        const std::size_t len = std::min(block, end - b);
        for (std::size_t s = first; s < last; ++s) {
            const tape& t = m_tapes[s];
            for (std::size_t k = 0; k < t.code.size(); ++k) {
                const instruction& ins = t.code[k];
                scalar* out = scratch.data() + k * block;
                const scalar* x = values[ins.a];
                const scalar* y = values[ins.b];
                switch (ins.code) {
                    case op_code::arg:
                        values[k] = args[ins.slot].data() + b;
                        continue;
                    case op_code::shift: {
                        const scalar* src = args[ins.slot].data();
                        const auto lo = static_cast<std::ptrdiff_t>(b) + ins.offset;
                        if (lo >= 0 && static_cast<std::size_t>(lo) + len <= n) {
                            values[k] = src + lo;
                            continue;
                        }
                        for (std::size_t i = 0; i < len; ++i)
                            out[i] = src[clamp_index(lo + static_cast<std::ptrdiff_t>(i), n)];
                        break;
                    }
                    case op_code::constant:
                        std::fill_n(out, len, ins.value);
                        break;
                    case op_code::negate:
                        for (std::size_t i = 0; i < len; ++i) out[i] = -x[i];
                        break;
                    case op_code::sin:
                        for (std::size_t i = 0; i < len; ++i) out[i] = std::sin(x[i]);
                        break;
                    case op_code::pow3:
                        for (std::size_t i = 0; i < len; ++i) out[i] = x[i] * x[i] * x[i];
                        break;
                    case op_code::add:
                        for (std::size_t i = 0; i < len; ++i) out[i] = x[i] + y[i];
                        break;
                    case op_code::sub:
                        for (std::size_t i = 0; i < len; ++i) out[i] = x[i] - y[i];
                        break;
                    case op_code::mul:
                        for (std::size_t i = 0; i < len; ++i) out[i] = x[i] * y[i];
                        break;
                }
                values[k] = out;
            }
            std::copy_n(values[t.code.size() - 1], len, targets[t.target].data() + b);
        }
    }
}

namespace detail {

bound_group::bound_group(const program& prog, std::vector<std::span<const scalar>> args,
                         std::vector<std::span<scalar>> targets, bool fused)
    : m_program(&prog), m_args(std::move(args)), m_targets(std::move(targets)) {
    const char* who = fused ? "fused_group" : "unfused_group";
    if (m_args.size() < prog.arg_count())
        throw std::invalid_argument(std::string(who) + ": program reads " +
                                    std::to_string(prog.arg_count()) + " arguments, " +
                                    std::to_string(m_args.size()) + " bound");
    if (m_targets.size() < prog.target_count())
        throw std::invalid_argument(std::string(who) + ": program writes " +
                                    std::to_string(prog.target_count()) + " targets, " +
                                    std::to_string(m_targets.size()) + " bound");
    if (prog.size() == 0) return;

    m_n = m_targets[prog.target_of(0)].size();
    std::set<std::size_t> used_args, used_targets;
    for (std::size_t s = 0; s < prog.size(); ++s) {
        used_targets.insert(prog.target_of(s));
        used_args.insert(prog.reads(s).begin(), prog.reads(s).end());
    }
    for (auto t : used_targets)
        odekit::detail::check_equal_lengths(who, m_n, m_targets[t].size());
    for (auto a : used_args) odekit::detail::check_equal_lengths(who, m_n, m_args[a].size());

    if (fused) {
        for (auto t : used_targets) {
            const auto& tv = m_targets[t];
            for (auto a : used_args)
                if (overlaps(tv.data(), tv.size(), m_args[a].data(), m_args[a].size()))
                    throw std::invalid_argument("fused_group: target " + std::to_string(t) +
                                                " aliases argument " + std::to_string(a));
            for (auto u : used_targets)
                if (u != t && overlaps(tv.data(), tv.size(), m_targets[u].data(), m_targets[u].size()))
                    throw std::invalid_argument("fused_group: targets " + std::to_string(t) +
                                                " and " + std::to_string(u) + " overlap");
        }
    } else {
        for (std::size_t s = 0; s < prog.size(); ++s) {
            const auto& tv = m_targets[prog.target_of(s)];
            for (auto a : prog.shifted_reads(s))
                if (overlaps(tv.data(), tv.size(), m_args[a].data(), m_args[a].size()))
                    throw std::invalid_argument("unfused_group: statement " + std::to_string(s) +
                                                " reads its own target through a shift");
        }
    }
}

}  // namespace detail

namespace {

// Distinct vectors, identified by their memory range.
struct span_key {
    const scalar* data;
    std::size_t size;
    auto operator<=>(const span_key&) const = default;
};

}  // namespace

std::size_t fused_group::scalars_moved() const {
    if (m_program->size() == 0) return 0;
    std::set<span_key> reads, writes;
    for (std::size_t s = 0; s < m_program->size(); ++s) {
        for (auto a : m_program->reads(s)) reads.insert({m_args[a].data(), m_args[a].size()});
        const auto& t = m_targets[m_program->target_of(s)];
        writes.insert({t.data(), t.size()});
    }
    return (reads.size() + writes.size()) * m_n;
}

std::size_t unfused_group::scalars_moved() const {
    std::size_t total = 0;
    for (std::size_t s = 0; s < m_program->size(); ++s) {
        std::set<span_key> reads;
        for (auto a : m_program->reads(s)) reads.insert({m_args[a].data(), m_args[a].size()});
        total += (reads.size() + 1) * m_n;
    }
    return total;
}

}  // namespace odekit::expr
