#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace odekit {

using scalar = double;

/// Contiguous ODE state. Element order is the canonical index order for
/// every backend.
using state_vector = std::vector<scalar>;

/// k equal-length components stored back to back in one contiguous block
/// (component-contiguous "X block, Y block, Z block" layout). Element i of
/// component c addresses ensemble member i.
class multi_state {
public:
    multi_state() = default;
    multi_state(std::size_t components, std::size_t length, scalar value = 0)
        : m_components(components), m_length(length), m_data(components * length, value) {}

    std::size_t components() const noexcept { return m_components; }
    std::size_t length() const noexcept { return m_length; }
    std::size_t size() const noexcept { return m_data.size(); }

    std::span<scalar> component(std::size_t c) {
        check_component(c);
        return {m_data.data() + c * m_length, m_length};
    }
    std::span<const scalar> component(std::size_t c) const {
        check_component(c);
        return {m_data.data() + c * m_length, m_length};
    }

    std::span<scalar> flat() noexcept { return m_data; }
    std::span<const scalar> flat() const noexcept { return m_data; }

    void resize(std::size_t components, std::size_t length) {
        m_components = components;
        m_length = length;
        m_data.resize(components * length);
    }

    friend bool operator==(const multi_state&, const multi_state&) = default;

private:
    void check_component(std::size_t c) const {
        if (c >= m_components)
            throw std::out_of_range("multi_state: component " + std::to_string(c) +
                                    " out of range (" + std::to_string(m_components) + ")");
    }

    std::size_t m_components = 0;
    std::size_t m_length = 0;
    std::vector<scalar> m_data;
};

// Flat element views used by the algebras.
inline std::span<scalar> flat(state_vector& s) noexcept { return s; }
inline std::span<const scalar> flat(const state_vector& s) noexcept { return s; }
inline std::span<scalar> flat(multi_state& s) noexcept { return s.flat(); }
inline std::span<const scalar> flat(const multi_state& s) noexcept { return s.flat(); }
inline std::span<scalar> flat(std::span<scalar> s) noexcept { return s; }
inline std::span<const scalar> flat(std::span<const scalar> s) noexcept { return s; }

// Scratch resizing happens only between steps.
inline void resize_like(state_vector& dst, const state_vector& src) {
    if (dst.size() != src.size()) dst.resize(src.size());
}
inline void resize_like(multi_state& dst, const multi_state& src) {
    if (dst.components() != src.components() || dst.length() != src.length())
        dst.resize(src.components(), src.length());
}

}  // namespace odekit
