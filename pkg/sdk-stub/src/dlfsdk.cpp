// Stub SDK implementation: call-order bookkeeping plus a faithful replay of
// the block latency model. The formulas are duplicated from the tuner on
// purpose so generated projects are self-contained; the cross-language test
// in the tuner repo pins the two against each other.
#include "dlfsdk.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

namespace {

struct ConvShape {
    long long c_in, c_out, h_out, w_out, k_h, k_w, stride, padding;
    long long h_in() const { return (h_out - 1) * stride + k_h - 2 * padding; }
    long long w_in() const { return (w_out - 1) * stride + k_w - 2 * padding; }
};

struct FcShape {
    long long m, k, n;
};

enum class OpKind { Conv, Fc, Activation };

}  // namespace

struct DlfOp {
    OpKind kind;
    ConvShape conv;
    FcShape fc;
};

struct DlfFusionOp {
    std::vector<DlfOp*> ops;
    int mp = 0;  // 0 = not set yet
    bool compiled = false;
};

struct DlfSession {
    DlfCostConfig cfg;
    std::vector<DlfFusionOp*> blocks;
};

namespace {

using Run = std::pair<long long, long long>;  // half-open [lo, hi)

// Input runs a conv reads to produce the given output runs, clipped to
// [0, extent). A stride wider than the kernel leaves gaps between the
// footprints of adjacent outputs; those are kept exact, not hulled over.
std::vector<Run> backmap(const std::vector<Run>& runs, long long k,
                         long long stride, long long padding,
                         long long extent) {
    std::vector<Run> raw;
    for (const Run& run : runs) {
        if (stride <= k) {
            raw.emplace_back(run.first * stride - padding,
                             (run.second - 1) * stride - padding + k);
        } else {
            for (long long r = run.first; r < run.second; ++r)
                raw.emplace_back(r * stride - padding, r * stride - padding + k);
        }
    }
    std::vector<Run> merged;
    for (Run run : raw) {  // raw is sorted: the map is monotone
        run.first = std::max(0LL, run.first);
        run.second = std::min(extent, run.second);
        if (run.first >= run.second) continue;
        if (!merged.empty() && run.first <= merged.back().second)
            merged.back().second = std::max(merged.back().second, run.second);
        else
            merged.push_back(run);
    }
    return merged;
}

long long run_length(const std::vector<Run>& runs) {
    long long total = 0;
    for (const Run& run : runs) total += run.second - run.first;
    return total;
}

// Most balanced factor pair of mp; the longer image dimension gets the
// larger factor, ties go to rows.
void tile_grid(int mp, long long h, long long w, int* rows, int* cols) {
    int small = 1;
    for (int d = 1; static_cast<long long>(d) * d <= mp; ++d)
        if (mp % d == 0) small = d;
    int large = mp / small;
    *rows = (h >= w) ? large : small;
    *cols = (h >= w) ? small : large;
}

// Elements each chain layer computes when the final output is tiled mp ways
// and every tile recomputes its upstream halo. Clamped to at least the
// unfused element count per layer.
std::vector<long long> halo_computed(const std::vector<ConvShape>& convs,
                                     int mp) {
    const size_t n = convs.size();
    std::vector<long long> base(n), computed(n, 0);
    for (size_t i = 0; i < n; ++i) base[i] = convs[i].h_out * convs[i].w_out;
    if (mp == 1) return base;

    const ConvShape& last = convs.back();
    int rows = 0, cols = 0;
    tile_grid(mp, last.h_out, last.w_out, &rows, &cols);
    for (int tr = 0; tr < rows; ++tr) {
        const long long r0 = tr * last.h_out / rows;
        const long long r1 = (tr + 1) * last.h_out / rows;
        for (int tc = 0; tc < cols; ++tc) {
            const long long c0 = tc * last.w_out / cols;
            const long long c1 = (tc + 1) * last.w_out / cols;
            computed[n - 1] += std::max(0LL, r1 - r0) * std::max(0LL, c1 - c0);
            std::vector<Run> rs, cs;
            if (r1 > r0) rs.emplace_back(r0, r1);
            if (c1 > c0) cs.emplace_back(c0, c1);
            for (size_t i = n - 1; i-- > 0;) {
                const ConvShape& down = convs[i + 1];
                rs = backmap(rs, down.k_h, down.stride, down.padding,
                             convs[i].h_out);
                cs = backmap(cs, down.k_w, down.stride, down.padding,
                             convs[i].w_out);
                computed[i] += run_length(rs) * run_length(cs);
            }
        }
    }
    for (size_t i = 0; i < n; ++i) computed[i] = std::max(computed[i], base[i]);
    return computed;
}

long long op_count(const DlfOp& op) {
    if (op.kind == OpKind::Conv) {
        const ConvShape& p = op.conv;
        return 2 * p.h_out * p.w_out * p.k_h * p.k_w * p.c_in * p.c_out;
    }
    if (op.kind == OpKind::Fc) return 2 * op.fc.m * op.fc.k * op.fc.n;
    return 0;
}

long long c_out_of(const DlfOp& op) {
    return op.kind == OpKind::Conv ? op.conv.c_out : op.fc.n;
}

// (input, weight, output) bytes for a compute op.
void io_bytes(const DlfOp& op, long long bpe, long long* in, long long* w,
              long long* out) {
    if (op.kind == OpKind::Conv) {
        const ConvShape& p = op.conv;
        *in = p.c_in * p.h_in() * p.w_in() * bpe;
        *w = p.c_in * p.c_out * p.k_h * p.k_w * bpe;
        *out = p.c_out * p.h_out * p.w_out * bpe;
    } else {
        *in = op.fc.m * op.fc.k * bpe;
        *w = op.fc.k * op.fc.n * bpe;
        *out = op.fc.m * op.fc.n * bpe;
    }
}

// Fused-block latency: compute time on a saturating per-core efficiency
// curve vs a pure bandwidth term, whichever dominates.
double block_latency_ms(const DlfFusionOp& block, const DlfCostConfig& cfg) {
    std::vector<const DlfOp*> members;
    for (const DlfOp* op : block.ops)
        if (op->kind != OpKind::Activation) members.push_back(op);

    long long mem_bytes = 0;
    if (!members.empty()) {
        // streamed intermediates: first input + all weights + last output
        long long in = 0, w = 0, out = 0;
        io_bytes(*members.front(), cfg.bytes_per_element, &in, &w, &out);
        mem_bytes = in;
        io_bytes(*members.back(), cfg.bytes_per_element, &in, &w, &out);
        mem_bytes += out;
        for (const DlfOp* op : members) {
            io_bytes(*op, cfg.bytes_per_element, &in, &w, &out);
            mem_bytes += w;
        }
    }
    const double memory_ms =
        static_cast<double>(mem_bytes) / (cfg.bandwidth_gbs * 1e9) * 1000.0;

    long long total_ops = 0;
    for (const DlfOp* op : members) total_ops += op_count(*op);
    if (total_ops == 0) return memory_ms;

    long long effective = total_ops;
    if (block.mp > 1) {
        std::vector<ConvShape> convs;
        for (const DlfOp* op : members)
            if (op->kind == OpKind::Conv) convs.push_back(op->conv);
        if (!convs.empty()) {
            const std::vector<long long> computed = halo_computed(convs, block.mp);
            effective = 0;
            size_t ci = 0;
            for (const DlfOp* op : members) {
                if (op->kind == OpKind::Conv) {
                    const ConvShape& p = op->conv;
                    effective += 2 * p.k_h * p.k_w * p.c_in * p.c_out
                                 * computed[ci++];
                } else {
                    effective += op_count(*op);
                }
            }
        }
    }

    const double effective_gops = static_cast<double>(effective) / 1e9;
    const double per_core_gops = effective_gops / block.mp;
    const double ratio = per_core_gops / cfg.opcount_critical_gops;
    const double core_eff = std::min(1.0, std::pow(ratio, cfg.gamma));
    double weighted = 0.0;
    for (const DlfOp* op : members) {
        const double chan = std::min(
            1.0, (static_cast<double>(c_out_of(*op)) / block.mp)
                     / cfg.min_channel_partition);
        weighted += static_cast<double>(op_count(*op)) * chan;
    }
    const double efficiency = core_eff * (weighted / static_cast<double>(total_ops));
    const double compute_ms =
        effective_gops / (block.mp * cfg.peak_gflops_per_core * efficiency)
        * 1000.0;
    return std::max(compute_ms, memory_ms);
}

}  // namespace

extern "C" {

DlfOp* dlf_create_conv_op(int c_in, int c_out, int h_out, int w_out,
                          int k_h, int k_w, int stride, int padding) {
    if (c_in < 1 || c_out < 1 || h_out < 1 || w_out < 1 || k_h < 1 ||
        k_w < 1 || stride < 1 || padding < 0)
        return nullptr;
    DlfOp* op = new DlfOp();
    op->kind = OpKind::Conv;
    op->conv = ConvShape{c_in, c_out, h_out, w_out, k_h, k_w, stride, padding};
    return op;
}

DlfOp* dlf_create_fc_op(long long m, long long k, long long n) {
    if (m < 1 || k < 1 || n < 1) return nullptr;
    DlfOp* op = new DlfOp();
    op->kind = OpKind::Fc;
    op->fc = FcShape{m, k, n};
    return op;
}

DlfOp* dlf_create_activation_op(const char* kind) {
    if (kind == nullptr) return nullptr;
    if (std::strcmp(kind, "relu") != 0 && std::strcmp(kind, "batchnorm") != 0 &&
        std::strcmp(kind, "pool") != 0 && std::strcmp(kind, "add") != 0)
        return nullptr;
    DlfOp* op = new DlfOp();
    op->kind = OpKind::Activation;
    return op;
}

void dlf_op_destroy(DlfOp* op) { delete op; }

DlfFusionOp* dlf_fusion_create(void) { return new DlfFusionOp(); }

void dlf_fusion_destroy(DlfFusionOp* fusion) {
    if (fusion == nullptr) return;
    for (DlfOp* op : fusion->ops) delete op;
    delete fusion;
}

int dlf_fusion_add_op(DlfFusionOp* fusion, DlfOp* op) {
    if (fusion == nullptr) return DLF_ERR_BAD_ARG;
    if (op == nullptr) return DLF_ERR_UNKNOWN_OP;
    if (fusion->compiled) return DLF_ERR_ORDER_VIOLATION;
    fusion->ops.push_back(op);
    return DLF_OK;
}

int dlf_fusion_set_model_parallelism(DlfFusionOp* fusion, int mp) {
    if (fusion == nullptr) return DLF_ERR_BAD_ARG;
    if (fusion->compiled) return DLF_ERR_ORDER_VIOLATION;
    if (mp < 1) return DLF_ERR_BAD_MP;
    fusion->mp = mp;
    return DLF_OK;
}

int dlf_fusion_compile(DlfFusionOp* fusion) {
    if (fusion == nullptr) return DLF_ERR_BAD_ARG;
    if (fusion->compiled || fusion->ops.empty() || fusion->mp == 0)
        return DLF_ERR_ORDER_VIOLATION;
    fusion->compiled = true;
    return DLF_OK;
}

DlfSession* dlf_session_create(const DlfCostConfig* cfg) {
    if (cfg == nullptr || cfg->num_cores < 1) return nullptr;
    DlfSession* session = new DlfSession();
    session->cfg = *cfg;
    return session;
}

void dlf_session_destroy(DlfSession* session) {
    if (session == nullptr) return;
    for (DlfFusionOp* fusion : session->blocks) dlf_fusion_destroy(fusion);
    delete session;
}

int dlf_session_add(DlfSession* session, DlfFusionOp* fusion) {
    if (session == nullptr || fusion == nullptr) return DLF_ERR_BAD_ARG;
    if (!fusion->compiled) return DLF_ERR_ORDER_VIOLATION;
    if (fusion->mp > session->cfg.num_cores) return DLF_ERR_BAD_MP;
    session->blocks.push_back(fusion);
    return DLF_OK;
}

int dlf_session_forward(DlfSession* session, DlfRunSummary* summary) {
    if (session == nullptr || summary == nullptr) return DLF_ERR_BAD_ARG;
    if (session->blocks.empty()) return DLF_ERR_ORDER_VIOLATION;
    summary->block_count = 0;
    summary->total_latency_ms = 0.0;
    for (const DlfFusionOp* block : session->blocks) {
        const double latency = block_latency_ms(*block, session->cfg);
        if (summary->block_count < DLF_MAX_BLOCKS)
            summary->block_latency_ms[summary->block_count] = latency;
        summary->block_count += 1;
        summary->total_latency_ms += latency;
    }
    return DLF_OK;
}

}  // extern "C"
