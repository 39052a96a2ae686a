#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "odekit/state.hpp"

// Lazy elementwise vector expressions. An expression is an immutable graph
// over argument slots; it is bound to concrete vectors only when a group of
// statements is executed. Statements in a fused group run inside a single
// loop over the index range, unfused statements get one loop each.
namespace odekit::expr {

enum class op_code : std::uint8_t { arg, shift, constant, negate, sin, pow3, add, sub, mul };

struct node {
    op_code code;
    std::size_t slot = 0;          // arg, shift
    std::ptrdiff_t offset = 0;     // shift
    scalar value = 0;              // constant
    std::shared_ptr<const node> lhs;
    std::shared_ptr<const node> rhs;
};

class expression {
public:
    explicit expression(std::shared_ptr<const node> root) : m_root(std::move(root)) {}

    const node& root() const noexcept { return *m_root; }
    const std::shared_ptr<const node>& ptr() const noexcept { return m_root; }

private:
    std::shared_ptr<const node> m_root;
};

/// Reference to argument vector `slot`, element i.
expression arg(std::size_t slot);
/// Element i+offset of argument `slot`, clamped to [0, n-1] at the ends.
expression shift(std::size_t slot, std::ptrdiff_t offset);
expression constant(scalar value);

expression operator-(const expression& a);
expression sin(const expression& a);
expression pow3(const expression& a);  // a*a*a

expression operator+(const expression& a, const expression& b);
expression operator-(const expression& a, const expression& b);
expression operator*(const expression& a, const expression& b);
expression operator+(scalar a, const expression& b);
expression operator+(const expression& a, scalar b);
expression operator-(scalar a, const expression& b);
expression operator-(const expression& a, scalar b);
expression operator*(scalar a, const expression& b);
expression operator*(const expression& a, scalar b);

using argument_list = std::span<const std::span<const scalar>>;

/// Value of `e` at index i, children evaluated left to right. This is the
/// tree-walking reference; compiled groups must agree with it bitwise.
scalar evaluate(const expression& e, argument_list args, std::size_t i);

/// Highest argument slot used by `e`, plus one.
std::size_t arity(const expression& e);

struct statement {
    std::size_t target;  // index into the group's target list
    expression value;
};

/// Statements flattened into instruction tapes. Immutable and shareable.
class program {
public:
    explicit program(std::vector<statement> statements);

    std::size_t size() const noexcept { return m_tapes.size(); }
    std::size_t arg_count() const noexcept { return m_arg_count; }
    std::size_t target_count() const noexcept { return m_target_count; }
    std::size_t target_of(std::size_t s) const { return m_tapes.at(s).target; }
    /// Argument slots read by statement s (sorted, unique).
    const std::vector<std::size_t>& reads(std::size_t s) const { return m_tapes.at(s).reads; }
    /// Argument slots read through a shifted (neighbour) reference by statement s.
    const std::vector<std::size_t>& shifted_reads(std::size_t s) const {
        return m_tapes.at(s).shifted;
    }

    /// Evaluate statements [first, last) for indices [begin, end) of vectors of
    /// length n. Blocks of indices are processed statement by statement, so a
    /// range of statements runs as one loop over i.
    void run(std::size_t first, std::size_t last, std::span<const std::span<const scalar>> args,
             std::span<const std::span<scalar>> targets, std::size_t n, std::size_t begin,
             std::size_t end) const;

private:
    struct instruction {
        op_code code;
        std::uint32_t a = 0, b = 0;  // operand instruction indices
        std::size_t slot = 0;
        std::ptrdiff_t offset = 0;
        scalar value = 0;
    };
    struct tape {
        std::size_t target;
        std::vector<instruction> code;
        std::vector<std::size_t> reads;
        std::vector<std::size_t> shifted;
    };

    static std::uint32_t emit(tape& t, const node& n);

    std::vector<tape> m_tapes;
    std::size_t m_arg_count = 0;
    std::size_t m_target_count = 0;
};

namespace detail {

/// Shared binding and validation for fused and unfused groups.
class bound_group {
public:
    std::size_t pass_count() const noexcept { return m_passes; }
    std::size_t length() const noexcept { return m_n; }
    std::size_t statement_count() const noexcept { return m_program->size(); }

protected:
    bound_group(const program& prog, std::vector<std::span<const scalar>> args,
                std::vector<std::span<scalar>> targets, bool fused);

    const program* m_program;
    std::vector<std::span<const scalar>> m_args;
    std::vector<std::span<scalar>> m_targets;
    std::size_t m_n = 0;
    std::size_t m_passes = 0;
};

}  // namespace detail

/// All statements evaluated in one pass over the index range. No target may
/// overlap any argument or any other target of the group; violations are
/// rejected at construction.
class fused_group : public detail::bound_group {
public:
    fused_group(const program& prog, std::vector<std::span<const scalar>> args,
                std::vector<std::span<scalar>> targets)
        : bound_group(prog, std::move(args), std::move(targets), true) {}

    /// Scalars read plus scalars written by one execution (distinct vectors
    /// counted once).
    std::size_t scalars_moved() const;

    template <class Algebra>
    void execute(const Algebra& algebra) {
        if (m_program->size() == 0) return;
        algebra.for_range(m_n, [&](std::size_t b, std::size_t e) {
            m_program->run(0, m_program->size(), m_args, m_targets, m_n, b, e);
        });
        ++m_passes;
    }
};

/// One pass per statement, in order. Later statements may read earlier
/// targets; a statement may also update its own target elementwise, but not
/// through a shifted reference.
class unfused_group : public detail::bound_group {
public:
    unfused_group(const program& prog, std::vector<std::span<const scalar>> args,
                  std::vector<std::span<scalar>> targets)
        : bound_group(prog, std::move(args), std::move(targets), false) {}

    std::size_t scalars_moved() const;

    template <class Algebra>
    void execute(const Algebra& algebra) {
        for (std::size_t s = 0; s < m_program->size(); ++s) {
            algebra.for_range(m_n, [&](std::size_t b, std::size_t e) {
                m_program->run(s, s + 1, m_args, m_targets, m_n, b, e);
            });
            ++m_passes;
        }
    }
};

template <class Algebra>
void fuse_execute(fused_group& group, const Algebra& algebra) {
    group.execute(algebra);
}

template <class Algebra>
void unfused_execute(unfused_group& group, const Algebra& algebra) {
    group.execute(algebra);
}

}  // namespace odekit::expr
