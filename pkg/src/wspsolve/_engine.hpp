// Pattern-table engine behind wspsolve._ckernel.
//
// Cells are keyed by task mask. A cell stores one representative assignment
// per pattern: a flat array of records (k stored values each; value = user+1,
// 0 = unassigned) plus an open-addressing index of (fingerprint, record) slots.
// Patterns are never stored; they are recomputed from a record on demand.
#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <deque>
#include <string>
#include <unordered_map>
#include <vector>

namespace wsp {

enum Code { EQ, NEQ, SIM, NSIM, SET_EQ, SET_NEQ, COUNTING, AT_MOST, AT_LEAST, FORBIDDEN };
enum Comp { UI, EQUIV, IDENTITY };

struct Row {
    int code;
    uint64_t scope, a, b, c, d;
};

static inline int ctz(uint64_t x) { return __builtin_ctzll(x); }

static inline uint64_t hash_bytes(const unsigned char* p, size_t len) {
    uint64_t h = 0x9E3779B97F4A7C15ull ^ len;
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ull;
        h ^= h >> 29;
    }
    h *= 0xBF58476D1CE4E5B9ull;
    h ^= h >> 32;
    return h;
}

template <class U>
struct Cell {
    std::vector<U> data;
    std::vector<uint64_t> slots;  // (fingerprint << 32) | (record + 1); 0 = empty
    uint32_t count = 0;
};

template <class U>
class Engine {
public:
    Engine(int k, int n_users, std::vector<Row> rows, std::vector<int> class_of,
           std::vector<int> class_size, std::vector<int> comps)
        : k_(k), rows_(std::move(rows)), comps_(std::move(comps)),
          class_size_(std::move(class_size)) {
        full_ = k >= 64 ? ~0ull : ((1ull << k) - 1);
        class_of_v_.assign(n_users + 1, 0);
        for (int u = 0; u < n_users; ++u) class_of_v_[u + 1] = class_of[u];
        in_prefix_.assign(class_size_.size(), 0);
        open_.assign(class_size_.size(), 0);
        stamp_.assign(n_users + 1, 0);
        label_.assign(n_users + 1, 0);
        keylen_ = 0;
        for (int c : comps_) {
            keylen_ += c == UI ? k : 2 * k;
            if (c == EQUIV) has_equiv_ = true;
        }
        key_.resize(keylen_ + 1);
        probe_key_.resize(keylen_ + 1);
        tmp_.assign(k + 1, 0);
        // seed: the empty plan over no users
        Cell<U>& c0 = cell_for(0);
        insert(c0, tmp_.data());
    }

    // Extend by one user: carry every plan over, re-key if a class filled up,
    // then add (prefix-i plan) + (block -> user) for every authorized free block.
    void step(int user, uint64_t auth) {
        const U val = static_cast<U>(user + 1);
        int cu = class_of_v_[val];
        bool was_open = open_[cu];
        in_prefix_[cu] += 1;
        open_[cu] = in_prefix_[cu] < class_size_[cu];
        std::vector<uint64_t> sources = masks_sorted();
        std::vector<uint32_t> old_count(sources.size());
        for (size_t s = 0; s < sources.size(); ++s) old_count[s] = cells_[index_[sources[s]]].count;
        // Extensions read the prefix-i records; a merge only applies to carry-overs.
        std::vector<std::vector<U>> before;
        if (has_equiv_ && was_open && !open_[cu]) {
            before.resize(sources.size());
            for (size_t s = 0; s < sources.size(); ++s) before[s] = cells_[index_[sources[s]]].data;
            rekey_all();
        }

        std::vector<uint64_t> subs;
        std::vector<std::vector<int>> checks;
        std::vector<Cell<U>*> targets;
        for (size_t s = 0; s < sources.size(); ++s) {
            const uint64_t tp = sources[s];
            const uint64_t avail = full_ & ~tp & auth;
            if (!avail) continue;
            subs.clear();
            checks.clear();
            uint64_t sub = 0;
            do {
                sub = (sub - avail) & avail;
                subs.push_back(sub);
                std::vector<int> idx;
                for (size_t r = 0; r < rows_.size(); ++r) {
                    uint64_t sc = rows_[r].scope;
                    if ((sc & sub) && !(sc & ~(tp | sub))) idx.push_back(static_cast<int>(r));
                }
                checks.push_back(std::move(idx));
            } while (sub != avail);
            targets.assign(subs.size(), nullptr);

            const U* records = before.empty() ? cells_[index_[tp]].data.data() : before[s].data();
            for (uint32_t r = 0; r < old_count[s]; ++r) {
                const U* base = records + static_cast<size_t>(r) * k_;
                for (size_t si = 0; si < subs.size(); ++si) {
                    ++generated_;
                    std::memcpy(tmp_.data(), base, sizeof(U) * k_);
                    for (uint64_t bits = subs[si]; bits; bits &= bits - 1) tmp_[ctz(bits)] = val;
                    bool ok = true;
                    for (int ri : checks[si]) {
                        if (!holds(rows_[ri], tmp_.data())) { ok = false; break; }
                    }
                    if (!ok) continue;
                    if (!targets[si]) targets[si] = &cell_for(tp | subs[si]);
                    insert(*targets[si], tmp_.data());
                }
            }
        }
        stored_ = 0;
        for (const Cell<U>& c : cells_) {
            stored_ += c.count;
            if (c.count > peak_) peak_ = c.count;
        }
    }

    bool has(uint64_t mask) const { return index_.count(mask) != 0; }
    bool has_full() const { return has(full_); }
    size_t cell_count() const { return cells_.size(); }
    uint64_t stored() const { return stored_; }
    uint64_t peak() const { return peak_; }
    uint64_t generated() const { return generated_; }

    std::vector<uint64_t> masks_sorted() const {
        std::vector<uint64_t> m;
        m.reserve(index_.size());
        for (const auto& kv : index_) m.push_back(kv.first);
        std::sort(m.begin(), m.end());
        return m;
    }

    // Record r of cell `mask` as user ids (-1 = unassigned).
    std::vector<int> record(uint64_t mask, uint32_t r) const {
        const Cell<U>& c = cells_[index_.at(mask)];
        std::vector<int> out(k_);
        for (int t = 0; t < k_; ++t) out[t] = static_cast<int>(c.data[static_cast<size_t>(r) * k_ + t]) - 1;
        return out;
    }

    uint32_t count(uint64_t mask) const { return cells_[index_.at(mask)].count; }

    std::string record_key(uint64_t mask, uint32_t r) {
        const Cell<U>& c = cells_[index_.at(mask)];
        fill_key(c.data.data() + static_cast<size_t>(r) * k_, key_.data());
        return std::string(reinterpret_cast<const char*>(key_.data()), keylen_);
    }

private:
    int k_;
    uint64_t full_;
    std::vector<Row> rows_;
    std::vector<int> comps_;
    std::vector<int> class_size_;
    std::vector<int> class_of_v_;
    std::vector<int> in_prefix_;
    std::vector<char> open_;
    std::vector<uint32_t> stamp_, label_;
    uint32_t gen_ = 0;
    size_t keylen_;
    bool has_equiv_ = false;
    std::vector<unsigned char> key_, probe_key_;
    std::vector<U> tmp_;
    std::deque<Cell<U>> cells_;
    std::unordered_map<uint64_t, uint32_t> index_;
    uint64_t stored_ = 1, peak_ = 1, generated_ = 0;

    Cell<U>& cell_for(uint64_t mask) {
        auto it = index_.find(mask);
        if (it != index_.end()) return cells_[it->second];
        index_.emplace(mask, static_cast<uint32_t>(cells_.size()));
        cells_.emplace_back();
        return cells_.back();
    }

    bool holds(const Row& r, const U* a) const {
        switch (r.code) {
            case EQ: return a[r.a] == a[r.b];
            case NEQ: return a[r.a] != a[r.b];
            case SIM: return class_of_v_[a[r.a]] == class_of_v_[a[r.b]];
            case NSIM: return class_of_v_[a[r.a]] != class_of_v_[a[r.b]];
            case SET_EQ:
            case SET_NEQ: {
                const bool want_eq = r.code == SET_EQ;
                for (uint64_t x = r.a; x; x &= x - 1)
                    for (uint64_t y = r.b; y; y &= y - 1)
                        if ((a[ctz(x)] == a[ctz(y)]) == want_eq) return true;
                return false;
            }
            case COUNTING: {
                for (uint64_t x = r.scope; x; x &= x - 1) {
                    int cnt = 0;
                    const U v = a[ctz(x)];
                    for (uint64_t y = r.scope; y; y &= y - 1) cnt += a[ctz(y)] == v;
                    if (cnt < static_cast<int>(r.a) || cnt > static_cast<int>(r.b)) return false;
                }
                return true;
            }
            case AT_MOST: return distinct(r.scope, a) <= static_cast<int>(r.a);
            case AT_LEAST: return distinct(r.scope, a) >= static_cast<int>(r.a);
            case FORBIDDEN: return !(a[r.a] == a[r.c] && a[r.b] == a[r.d]);
        }
        return false;
    }

    static int distinct(uint64_t scope, const U* a) {
        int count = 0;
        uint64_t earlier = 0;
        for (uint64_t x = scope; x; x &= x - 1) {
            const int t = ctz(x);
            bool fresh = true;
            for (uint64_t e = earlier; e; e &= e - 1)
                if (a[ctz(e)] == a[t]) { fresh = false; break; }
            count += fresh;
            earlier |= 1ull << t;
        }
        return count;
    }

    void fill_key(const U* a, unsigned char* out) {
        size_t pos = 0;
        for (int comp : comps_) {
            if (comp == UI) {
                ++gen_;
                uint32_t next = 0;
                for (int t = 0; t < k_; ++t) {
                    const U v = a[t];
                    if (!v) { out[pos++] = 0; continue; }
                    if (stamp_[v] != gen_) { stamp_[v] = gen_; label_[v] = ++next; }
                    out[pos++] = static_cast<unsigned char>(label_[v]);
                }
            } else {
                for (int t = 0; t < k_; ++t) {
                    const U v = a[t];
                    unsigned lab = 0;
                    if (v) {
                        if (comp == EQUIV) {
                            const int c = class_of_v_[v];
                            lab = open_[c] ? static_cast<unsigned>(c + 1) : 0u;
                        } else {
                            lab = v;
                        }
                    }
                    out[pos++] = static_cast<unsigned char>((lab >> 8) & 0xFF);
                    out[pos++] = static_cast<unsigned char>(lab & 0xFF);
                }
            }
        }
    }

    void place(Cell<U>& c, uint64_t h, uint32_t rec) {
        const size_t mask = c.slots.size() - 1;
        size_t pos = h & mask;
        while (c.slots[pos]) pos = (pos + 1) & mask;
        c.slots[pos] = ((h >> 32) << 32) | (static_cast<uint64_t>(rec) + 1);
    }

    void grow(Cell<U>& c) {
        size_t cap = c.slots.empty() ? 8 : c.slots.size() * 2;
        c.slots.assign(cap, 0);
        for (uint32_t r = 0; r < c.count; ++r) {
            fill_key(c.data.data() + static_cast<size_t>(r) * k_, probe_key_.data());
            place(c, hash_bytes(probe_key_.data(), keylen_), r);
        }
    }

    // Insert `a` unless its pattern is already present. Returns true if added.
    bool insert(Cell<U>& c, const U* a) {
        if ((static_cast<size_t>(c.count) + 1) * 2 > c.slots.size()) grow(c);
        fill_key(a, key_.data());
        const uint64_t h = hash_bytes(key_.data(), keylen_);
        const uint64_t fp = h >> 32;
        const size_t mask = c.slots.size() - 1;
        size_t pos = h & mask;
        while (c.slots[pos]) {
            const uint64_t s = c.slots[pos];
            if ((s >> 32) == fp) {
                const uint32_t rec = static_cast<uint32_t>(s & 0xFFFFFFFFull) - 1;
                fill_key(c.data.data() + static_cast<size_t>(rec) * k_, probe_key_.data());
                if (std::memcmp(probe_key_.data(), key_.data(), keylen_) == 0) return false;
            }
            pos = (pos + 1) & mask;
        }
        c.slots[pos] = (fp << 32) | (static_cast<uint64_t>(c.count) + 1);
        c.data.insert(c.data.end(), a, a + k_);
        c.count += 1;
        return true;
    }

    // Patterns can merge when a class stops straddling; keep the first record of each.
    void rekey_all() {
        for (Cell<U>& c : cells_) {
            std::vector<U> old;
            old.swap(c.data);
            const uint32_t n = c.count;
            c.count = 0;
            c.slots.clear();
            c.data.reserve(old.size());
            for (uint32_t r = 0; r < n; ++r) insert(c, old.data() + static_cast<size_t>(r) * k_);
        }
    }
};

}  // namespace wsp
