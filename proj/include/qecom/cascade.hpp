#pragma once

#include <bit>
#include <cstdint>
#include <deque>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "bits.hpp"
#include "rng.hpp"

namespace qecom {

struct CascadeConfig {
    size_t block_bits = 1ull << 20;
    size_t segment_bits = 600;
    int max_passes = 3;
    uint64_t permutation_seed = 0;

    void validate() const {
        if (segment_bits < 2) throw std::invalid_argument("cascade: segment_bits must be >= 2");
        if (max_passes < 1) throw std::invalid_argument("cascade: max_passes must be >= 1");
        if (block_bits < segment_bits) throw std::invalid_argument("cascade: block_bits must be >= segment_bits");
    }
};

// One disclosed parity. search_path is empty for a top-level segment parity
// and a string of 'L'/'R' moves for each binary-search step.
struct CascadeTranscriptEntry {
    int pass;
    size_t block;
    size_t segment_index;
    uint8_t parity;
    std::string search_path;
};

struct CascadeResult {
    BitString corrected_peer_key;
    size_t leaked_bits = 0;    // disclosed parity count (top-level + search steps)
    size_t checksum_bits = 0;  // verification checksum disclosure, reported separately
    int passes_used = 0;
    bool residual_mismatch = false;
    std::vector<CascadeTranscriptEntry> transcript;

    size_t total_leaked() const { return leaked_bits + checksum_bits; }
};

namespace detail {

// CRC-64/ECMA-182 over the bit string, one bit at a time.
inline uint64_t crc64_bits(const uint8_t* b, size_t len) {
    constexpr uint64_t kPoly = 0x42f0e1eba9ea3693ull;
    uint64_t crc = 0;
    for (size_t i = 0; i < len; ++i) {
        uint64_t top = (crc >> 63) ^ b[i];
        crc <<= 1;
        if (top) crc ^= kPoly;
    }
    return crc;
}

// Per-block state: permutations and segment-parity bookkeeping survive across
// passes so a fix in pass p can re-open segments of earlier passes.
class BlockReconciler {
  public:
    BlockReconciler(const uint8_t* a, uint8_t* b, size_t len, size_t block_index,
                    const CascadeConfig& cfg, CounterRng rng, CascadeResult& out)
        : a_(a), b_(b), len_(len), blk_(block_index), cfg_(cfg), rng_(std::move(rng)), out_(out) {}

    void run_pass(int pass) {
        start_pass(pass);
        size_t n_seg = (len_ + cfg_.segment_bits - 1) / cfg_.segment_bits;
        for (size_t s = 0; s < n_seg; ++s) {
            uint8_t pa = segment_parity(pass, s, a_), pb = segment_parity(pass, s, b_);
            out_.transcript.push_back({pass, blk_, s, pa, ""});
            ++out_.leaked_bits;
            odd_[static_cast<size_t>(pass - 1)][s] = (pa != pb);
            if (pa != pb) queue_.push_back({pass, s});
        }
        drain_queue();
    }

  private:
    struct SegRef {
        int pass;
        size_t seg;
    };

    void start_pass(int pass) {
        CounterRng r = rng_.fork("pass-" + std::to_string(pass));
        std::vector<uint32_t> p = r.permutation(len_);
        std::vector<uint32_t> perm(len_), inv(len_);
        for (size_t i = 0; i < len_; ++i) {
            perm[i] = static_cast<uint32_t>(p[i]);
            inv[p[i]] = static_cast<uint32_t>(i);
        }
        perm_.push_back(std::move(perm));
        inv_.push_back(std::move(inv));
        odd_.emplace_back((len_ + cfg_.segment_bits - 1) / cfg_.segment_bits, 0);
    }

    // segment s covers permuted positions [s*seg, min((s+1)*seg, len))
    std::pair<size_t, size_t> segment_range(size_t s) const {
        size_t lo = s * cfg_.segment_bits;
        size_t hi = std::min(lo + cfg_.segment_bits, len_);
        return {lo, hi};
    }

    uint8_t range_parity(int pass, size_t lo, size_t hi, const uint8_t* key) const {
        const auto& perm = perm_[static_cast<size_t>(pass - 1)];
        uint8_t par = 0;
        for (size_t i = lo; i < hi; ++i) par ^= key[perm[i]];
        return par;
    }

    uint8_t segment_parity(int pass, size_t s, const uint8_t* key) const {
        auto [lo, hi] = segment_range(s);
        return range_parity(pass, lo, hi, key);
    }

    void drain_queue() {
        while (!queue_.empty()) {
            SegRef sr = queue_.front();
            queue_.pop_front();
            if (!odd_[static_cast<size_t>(sr.pass - 1)][sr.seg]) continue;  // already even again
            binary_search_fix(sr);
        }
    }

    // Isolate and flip one error inside an odd segment. The interval is
    // padded to the next power of two so every search costs exactly
    // ceil(log2 L) disclosures: each step reveals the left half's parity and
    // the right half's is inferred.
    void binary_search_fix(const SegRef& sr) {
        auto [lo, hi] = segment_range(sr.seg);
        size_t width = std::bit_ceil(hi - lo);
        std::string path;
        while (width > 1) {
            size_t mid = lo + width / 2;
            size_t left_hi = std::min(mid, hi);
            uint8_t pa = range_parity(sr.pass, lo, left_hi, a_);
            uint8_t pb = range_parity(sr.pass, lo, left_hi, b_);
            ++out_.leaked_bits;
            path += (pa != pb) ? 'L' : 'R';
            out_.transcript.push_back({sr.pass, blk_, sr.seg, pa, path});
            if (pa != pb) hi = left_hi;
            else lo = mid;
            width /= 2;
        }
        size_t orig = perm_[static_cast<size_t>(sr.pass - 1)][lo];
        b_[orig] ^= 1;
        // cascade: toggle this position's segment parity in every pass run so
        // far, queueing any segment that turns odd
        for (int p = 1; p <= static_cast<int>(perm_.size()); ++p) {
            size_t seg = inv_[static_cast<size_t>(p - 1)][orig] / cfg_.segment_bits;
            uint8_t& o = odd_[static_cast<size_t>(p - 1)][seg];
            o ^= 1;
            if (o) queue_.push_back({p, seg});
        }
    }

    const uint8_t* a_;
    uint8_t* b_;
    size_t len_;
    size_t blk_;
    const CascadeConfig& cfg_;
    CounterRng rng_;
    CascadeResult& out_;
    std::vector<std::vector<uint32_t>> perm_, inv_;
    std::vector<std::vector<uint8_t>> odd_;
    std::deque<SegRef> queue_;
};

}  // namespace detail

// Corrects key_b toward key_a. Keys are cut into block_bits blocks; a
// trailing remainder shorter than one block is corrected as its own block.
// After each pass the disclosed 64-bit checksum (reported in checksum_bits,
// not leaked_bits) is compared; a match ends reconciliation early, and a
// mismatch left after max_passes sets residual_mismatch.
inline CascadeResult cascade_reconcile(const BitString& key_a, const BitString& key_b,
                                       const CascadeConfig& cfg) {
    cfg.validate();
    if (key_a.size() != key_b.size()) throw std::invalid_argument("cascade: key length mismatch");
    CascadeResult out;
    out.corrected_peer_key = key_b;
    out.checksum_bits = 64;
    if (key_a.empty()) {
        out.residual_mismatch = false;
        return out;
    }
    const uint64_t want = detail::crc64_bits(key_a.data(), key_a.size());
    CounterRng root(cfg.permutation_seed);
    size_t n_blocks = (key_a.size() + cfg.block_bits - 1) / cfg.block_bits;
    std::vector<std::unique_ptr<detail::BlockReconciler>> blocks;
    for (size_t blk = 0; blk < n_blocks; ++blk) {
        size_t lo = blk * cfg.block_bits;
        size_t len = std::min(cfg.block_bits, key_a.size() - lo);
        blocks.push_back(std::make_unique<detail::BlockReconciler>(
            key_a.data() + lo, out.corrected_peer_key.data() + lo, len, blk, cfg,
            root.fork("block-" + std::to_string(blk)), out));
    }
    bool match = false;
    for (int pass = 1; pass <= cfg.max_passes && !match; ++pass) {
        for (auto& b : blocks) b->run_pass(pass);
        out.passes_used = pass;
        match = want == detail::crc64_bits(out.corrected_peer_key.data(), out.corrected_peer_key.size());
    }
    out.residual_mismatch = !match;
    return out;
}

}  // namespace qecom
