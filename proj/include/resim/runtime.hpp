#pragma once

// In-process stand-in for an MPI communicator. Each simulated rank runs on
// its own thread; `GroupOptions::max_active` bounds how many of them execute
// at once (1 = strictly interleaved). Results never depend on that bound:
// point-to-point channels are FIFO per (source, destination, tag) and every
// collective combines contributions in ascending rank order.

#include <cstddef>
#include <cstring>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "resim/error.hpp"

namespace resim {

namespace detail {
class GroupState;
}

/// Error raised by spawn_ranks when one rank fails; keeps the original code.
class RankFailure : public Error {
public:
    RankFailure(Errc code, int rank, const std::string& what)
        : Error(code, what), rank_(rank) {}
    int rank() const noexcept { return rank_; }

private:
    int rank_;
};

enum class CollectiveKind : int {
    barrier,
    allgather,
    allreduce_sum,
    allreduce_max,
    allreduce_min,
    broadcast,
    alltoall,
};

class Comm {
public:
    Comm(const Comm&) = delete;
    Comm& operator=(const Comm&) = delete;

    int rank() const noexcept { return rank_; }
    int size() const noexcept;

    // point-to-point; send is buffered and never blocks
    void send_bytes(int dest, int tag, std::vector<std::byte> payload);
    std::vector<std::byte> recv_bytes(int src, int tag);

    template <class T>
    void send(int dest, int tag, std::span<const T> values) {
        static_assert(std::is_trivially_copyable_v<T>);
        std::vector<std::byte> buf(values.size_bytes());
        if (!buf.empty()) std::memcpy(buf.data(), values.data(), buf.size());
        send_bytes(dest, tag, std::move(buf));
    }

    template <class T>
    std::vector<T> recv(int src, int tag) {
        static_assert(std::is_trivially_copyable_v<T>);
        return from_bytes<T>(recv_bytes(src, tag));
    }

    void barrier();

    /// Every rank contributes a byte string and receives all of them in rank
    /// order. `signature` must agree across ranks (kind-specific check).
    std::vector<std::vector<std::byte>> allgather_bytes(std::span<const std::byte> mine,
                                                        CollectiveKind kind,
                                                        std::uint64_t signature = 0);

    template <class T>
    std::vector<T> allgather(const T& value) {
        static_assert(std::is_trivially_copyable_v<T>);
        auto parts = allgather_bytes(as_bytes(std::span<const T>(&value, 1)), CollectiveKind::allgather,
                                     sizeof(T));
        std::vector<T> out(parts.size());
        for (std::size_t r = 0; r < parts.size(); ++r) std::memcpy(&out[r], parts[r].data(), sizeof(T));
        return out;
    }

    template <class T>
    std::vector<std::vector<T>> allgatherv(std::span<const T> values) {
        static_assert(std::is_trivially_copyable_v<T>);
        auto parts = allgather_bytes(as_bytes(values), CollectiveKind::allgather, sizeof(T) + (1ull << 32));
        std::vector<std::vector<T>> out;
        out.reserve(parts.size());
        for (auto& p : parts) out.push_back(from_bytes<T>(std::move(p)));
        return out;
    }

    double allreduce_sum(double value);
    Index allreduce_sum(Index value);
    std::vector<double> allreduce_sum(std::span<const double> values);
    double allreduce_max(double value);
    Index allreduce_max(Index value);
    Index allreduce_min(Index value);

    template <class T>
    T broadcast(int root, const T& value) {
        static_assert(std::is_trivially_copyable_v<T>);
        auto v = broadcast_vector<T>(root, std::span<const T>(&value, 1));
        return v.at(0);
    }

    template <class T>
    std::vector<T> broadcast_vector(int root, std::span<const T> values) {
        static_assert(std::is_trivially_copyable_v<T>);
        if (root < 0 || root >= size()) fail(Errc::invalid_argument, "broadcast root out of range");
        std::span<const std::byte> mine;
        if (rank_ == root) mine = as_bytes(values);
        auto parts = allgather_bytes(mine, CollectiveKind::broadcast, static_cast<std::uint64_t>(root));
        return from_bytes<T>(std::move(parts[root]));
    }

    /// outgoing[p] is delivered to rank p; result[p] is what rank p sent here.
    template <class T>
    std::vector<std::vector<T>> alltoallv(const std::vector<std::vector<T>>& outgoing) {
        static_assert(std::is_trivially_copyable_v<T>);
        if (static_cast<int>(outgoing.size()) != size()) {
            fail(Errc::invalid_argument, "alltoallv needs one buffer per rank");
        }
        std::vector<std::vector<T>> incoming(outgoing.size());
        for (int p = 0; p < size(); ++p) {
            if (p == rank_) continue;
            send<T>(p, kTagAlltoall, outgoing[p]);
        }
        incoming[rank_] = outgoing[rank_];
        for (int p = 0; p < size(); ++p) {
            if (p == rank_) continue;
            incoming[p] = recv<T>(p, kTagAlltoall);
        }
        return incoming;
    }

    // Tags below zero are reserved for library protocols.
    static constexpr int kTagAlltoall = -1;
    static constexpr int kTagHalo = -2;
    static constexpr int kTagReverseHalo = -3;

private:
    friend class detail::GroupState;
    Comm(detail::GroupState& group, int rank) : group_(&group), rank_(rank) {}

    template <class T>
    static std::span<const std::byte> as_bytes(std::span<const T> values) {
        return {reinterpret_cast<const std::byte*>(values.data()), values.size_bytes()};
    }

    template <class T>
    static std::vector<T> from_bytes(const std::vector<std::byte>& buf) {
        if (buf.size() % sizeof(T) != 0) fail(Errc::plan_mismatch, "message size is not a multiple of the element size");
        std::vector<T> out(buf.size() / sizeof(T));
        if (!buf.empty()) std::memcpy(out.data(), buf.data(), buf.size());
        return out;
    }

    detail::GroupState* group_;
    int rank_;
};

struct GroupOptions {
    /// Upper bound on ranks executing simultaneously; 0 means no bound.
    int max_active = 0;
};

/// Runs `program` once per rank and returns after every rank has finished.
/// A failing rank aborts the whole group; the error is rethrown as
/// RankFailure naming that rank.
void run_ranks(int np, const std::function<void(Comm&)>& program, GroupOptions options = {});

template <class Program>
auto spawn_ranks(int np, Program&& program, GroupOptions options = {}) {
    using R = std::invoke_result_t<Program&, Comm&>;
    if constexpr (std::is_void_v<R>) {
        run_ranks(np, [&](Comm& c) { program(c); }, options);
    } else {
        std::vector<std::optional<R>> slots(np > 0 ? np : 0);
        run_ranks(np, [&](Comm& c) { slots[c.rank()].emplace(program(c)); }, options);
        std::vector<R> out;
        out.reserve(slots.size());
        for (auto& s : slots) out.push_back(std::move(*s));
        return out;
    }
}

}  // namespace resim
