#include "resim/runtime.hpp"

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <exception>
#include <memory>
#include <mutex>
#include <semaphore>
#include <thread>

namespace resim {

namespace detail {

namespace {

// Thrown inside ranks that are unblocked because another rank failed.
struct GroupAborted {};

struct Message {
    int tag;
    std::vector<std::byte> data;
};

}  // namespace

class GroupState {
public:
    GroupState(int np, int max_active)
        : np_(np), tokens_(max_active), channels_(static_cast<std::size_t>(np) * np),
          waiting_(np, nullptr), slots_(np) {}

    int size() const noexcept { return np_; }

    // Releases the execution token while blocked; the token is taken back
    // after the caller drops the lock.
    class TokenDebt {
    public:
        explicit TokenDebt(GroupState& g) : g_(g) {}
        ~TokenDebt() {
            if (owed_) g_.tokens_.acquire();
        }
        TokenDebt(const TokenDebt&) = delete;
        TokenDebt& operator=(const TokenDebt&) = delete;

    private:
        friend class GroupState;
        GroupState& g_;
        bool owed_ = false;
    };

    void send(int src, int dest, int tag, std::vector<std::byte> payload) {
        if (dest < 0 || dest >= np_) fail(Errc::invalid_argument, "send destination out of range");
        std::lock_guard lk(mu_);
        check_aborted();
        channel(src, dest).push_back(Message{tag, std::move(payload)});
        cv_.notify_all();
    }

    std::vector<std::byte> recv(int src, int dest, int tag) {
        if (src < 0 || src >= np_) fail(Errc::invalid_argument, "recv source out of range");
        TokenDebt debt(*this);
        std::unique_lock lk(mu_);
        auto& ch = channel(src, dest);
        auto find = [&] {
            return std::find_if(ch.begin(), ch.end(), [&](const Message& m) { return m.tag == tag; });
        };
        wait(lk, debt, dest, [&] { return find() != ch.end(); });
        auto it = find();
        auto data = std::move(it->data);
        ch.erase(it);
        return data;
    }

    std::vector<std::vector<std::byte>> allgather(int rank, std::span<const std::byte> mine,
                                                  CollectiveKind kind, std::uint64_t signature) {
        TokenDebt debt(*this);
        std::unique_lock lk(mu_);
        wait(lk, debt, rank, [&] { return !releasing_; });
        if (arrived_ == 0) {
            kind_ = kind;
            signature_ = signature;
        } else if (kind_ != kind || signature_ != signature) {
            fail(Errc::collective_mismatch,
                 "rank " + std::to_string(rank) + " entered collective kind " +
                     std::to_string(static_cast<int>(kind)) + " while the group is in kind " +
                     std::to_string(static_cast<int>(kind_)));
        }
        slots_[rank].assign(mine.begin(), mine.end());
        const std::uint64_t my_generation = generation_;
        if (++arrived_ == np_) {
            result_ = std::make_shared<std::vector<std::vector<std::byte>>>(std::move(slots_));
            slots_.assign(np_, {});
            releasing_ = true;
            ++generation_;
            cv_.notify_all();
        } else {
            wait(lk, debt, rank, [&] { return generation_ != my_generation; });
        }
        auto out = *result_;
        if (++departed_ == np_) {
            arrived_ = 0;
            departed_ = 0;
            releasing_ = false;
            result_.reset();
            cv_.notify_all();
        }
        return out;
    }

    void run(const std::function<void(Comm&)>& program) {
        std::vector<std::thread> threads;
        threads.reserve(np_);
        for (int r = 0; r < np_; ++r) {
            threads.emplace_back([this, r, &program] { rank_main(r, program); });
        }
        for (auto& t : threads) t.join();
        if (first_error_) rethrow_failure();
    }

private:
    std::deque<Message>& channel(int src, int dest) {
        return channels_[static_cast<std::size_t>(src) * np_ + dest];
    }

    void check_aborted() const {
        if (aborted_) throw GroupAborted{};
    }

    template <class Pred>
    void wait(std::unique_lock<std::mutex>& lk, TokenDebt& debt, int rank, Pred pred) {
        check_aborted();
        if (pred()) return;
        std::function<bool()> f = pred;
        waiting_[rank] = &f;
        if (!debt.owed_) {
            tokens_.release();
            debt.owed_ = true;
        }
        detect_deadlock();
        cv_.wait(lk, [&] { return aborted_ || f(); });
        waiting_[rank] = nullptr;
        check_aborted();
    }

    // Called with the lock held. A deadlock exists when every unfinished rank
    // is parked on a condition that is still false.
    void detect_deadlock() {
        int parked = 0;
        for (int r = 0; r < np_; ++r) {
            if (waiting_[r] == nullptr) continue;
            if ((*waiting_[r])()) return;
            ++parked;
        }
        if (parked > 0 && parked == np_ - finished_) {
            abort_locked(-1, std::make_exception_ptr(Error(
                                 Errc::deadlock, "all live ranks are blocked (mismatched communication)")));
        }
    }

    void abort_locked(int rank, std::exception_ptr e) {
        if (!aborted_) {
            aborted_ = true;
            first_error_ = std::move(e);
            failed_rank_ = rank;
        }
        cv_.notify_all();
    }

    void rank_main(int r, const std::function<void(Comm&)>& program) {
        tokens_.acquire();
        Comm comm(*this, r);
        try {
            program(comm);
        } catch (const GroupAborted&) {
        } catch (...) {
            std::lock_guard lk(mu_);
            abort_locked(r, std::current_exception());
        }
        {
            std::lock_guard lk(mu_);
            ++finished_;
            if (!aborted_) detect_deadlock();
            cv_.notify_all();
        }
        tokens_.release();
    }

    [[noreturn]] void rethrow_failure() const {
        const std::string who = failed_rank_ >= 0 ? "rank " + std::to_string(failed_rank_) : "group";
        try {
            std::rethrow_exception(first_error_);
        } catch (const Error& e) {
            throw RankFailure(e.code(), failed_rank_, who + ": " + e.what());
        } catch (const std::exception& e) {
            throw RankFailure(Errc::rank_failure, failed_rank_, who + ": " + e.what());
        } catch (...) {
            throw RankFailure(Errc::rank_failure, failed_rank_, who + ": unknown exception");
        }
    }

    const int np_;
    std::mutex mu_;
    std::condition_variable cv_;
    std::counting_semaphore<(1 << 20)> tokens_;
    std::vector<std::deque<Message>> channels_;
    std::vector<std::function<bool()>*> waiting_;

    int arrived_ = 0;
    int departed_ = 0;
    bool releasing_ = false;
    std::uint64_t generation_ = 0;
    CollectiveKind kind_ = CollectiveKind::barrier;
    std::uint64_t signature_ = 0;
    std::vector<std::vector<std::byte>> slots_;
    std::shared_ptr<std::vector<std::vector<std::byte>>> result_;

    bool aborted_ = false;
    int finished_ = 0;
    int failed_rank_ = -1;
    std::exception_ptr first_error_;
};

}  // namespace detail

int Comm::size() const noexcept { return group_->size(); }

void Comm::send_bytes(int dest, int tag, std::vector<std::byte> payload) {
    group_->send(rank_, dest, tag, std::move(payload));
}

std::vector<std::byte> Comm::recv_bytes(int src, int tag) { return group_->recv(src, rank_, tag); }

void Comm::barrier() { group_->allgather(rank_, {}, CollectiveKind::barrier, 0); }

std::vector<std::vector<std::byte>> Comm::allgather_bytes(std::span<const std::byte> mine,
                                                          CollectiveKind kind, std::uint64_t signature) {
    return group_->allgather(rank_, mine, kind, signature);
}

namespace {

template <class T>
std::vector<T> gather_scalars(Comm& comm, T value, CollectiveKind kind) {
    auto parts = comm.allgather_bytes(
        std::span<const std::byte>(reinterpret_cast<const std::byte*>(&value), sizeof(T)), kind, sizeof(T));
    std::vector<T> out(parts.size());
    for (std::size_t r = 0; r < parts.size(); ++r) std::memcpy(&out[r], parts[r].data(), sizeof(T));
    return out;
}

}  // namespace

double Comm::allreduce_sum(double value) {
    double sum = 0.0;
    for (double v : gather_scalars(*this, value, CollectiveKind::allreduce_sum)) sum += v;
    return sum;
}

Index Comm::allreduce_sum(Index value) {
    Index sum = 0;
    for (Index v : gather_scalars(*this, value, CollectiveKind::allreduce_sum)) sum += v;
    return sum;
}

std::vector<double> Comm::allreduce_sum(std::span<const double> values) {
    auto parts = allgather_bytes(
        std::span<const std::byte>(reinterpret_cast<const std::byte*>(values.data()), values.size_bytes()),
        CollectiveKind::allreduce_sum, values.size());
    std::vector<double> sum(values.size(), 0.0);
    std::vector<double> tmp(values.size());
    for (auto& p : parts) {
        std::memcpy(tmp.data(), p.data(), p.size());
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += tmp[i];
    }
    return sum;
}

double Comm::allreduce_max(double value) {
    auto all = gather_scalars(*this, value, CollectiveKind::allreduce_max);
    return *std::max_element(all.begin(), all.end());
}

Index Comm::allreduce_max(Index value) {
    auto all = gather_scalars(*this, value, CollectiveKind::allreduce_max);
    return *std::max_element(all.begin(), all.end());
}

Index Comm::allreduce_min(Index value) {
    auto all = gather_scalars(*this, value, CollectiveKind::allreduce_min);
    return *std::min_element(all.begin(), all.end());
}

void run_ranks(int np, const std::function<void(Comm&)>& program, GroupOptions options) {
    if (np < 1) fail(Errc::invalid_argument, "rank count must be >= 1");
    const int active = options.max_active <= 0 ? np : std::min(options.max_active, np);
    detail::GroupState group(np, active);
    group.run(program);
}

}  // namespace resim
