/* Stub accelerator SDK.
 *
 * Mimics the vendor operator API closely enough that generated inference
 * sessions compile, link, and run. No tensor math happens: forward() replays
 * the latency model for each compiled fusion container and reports per-block
 * and total milliseconds.
 *
 * Call order per container: create ops -> fusion_add_op -> set mp ->
 * compile -> session_add. Violations return error codes; nothing aborts.
 * Ownership transfers on success: an added op belongs to its fusion, an
 * added fusion to its session. Destroying the session frees everything it
 * holds.
 */
#ifndef DLFSDK_H
#define DLFSDK_H

#ifdef __cplusplus
extern "C" {
#endif

enum {
    DLF_OK = 0,
    DLF_ERR_ORDER_VIOLATION = 1,
    DLF_ERR_BAD_MP = 2,
    DLF_ERR_UNKNOWN_OP = 3,
    DLF_ERR_BAD_ARG = 4
};

#define DLF_MAX_BLOCKS 256

typedef struct DlfCostConfig {
    int num_cores;
    double peak_gflops_per_core;
    double bandwidth_gbs;
    int bytes_per_element;
    int min_channel_partition;
    double opcount_critical_gops;
    double gamma;
} DlfCostConfig;

typedef struct DlfRunSummary {
    int block_count;
    double block_latency_ms[DLF_MAX_BLOCKS];
    double total_latency_ms;
} DlfRunSummary;

typedef struct DlfOp DlfOp;
typedef struct DlfFusionOp DlfFusionOp;
typedef struct DlfSession DlfSession;

/* Operator constructors. Spatial sizes are output-side; the input extent is
 * reconstructed from kernel/stride/padding. Activation kinds are the
 * attached-layer names ("relu", "batchnorm", "pool", "add"); an unknown kind
 * returns NULL. */
DlfOp* dlf_create_conv_op(int c_in, int c_out, int h_out, int w_out,
                          int k_h, int k_w, int stride, int padding);
DlfOp* dlf_create_fc_op(long long m, long long k, long long n);
DlfOp* dlf_create_activation_op(const char* kind);
void dlf_op_destroy(DlfOp* op);

DlfFusionOp* dlf_fusion_create(void);
void dlf_fusion_destroy(DlfFusionOp* fusion);
/* Returns DLF_ERR_UNKNOWN_OP for a NULL op (the constructor already
 * rejected it) and DLF_ERR_ORDER_VIOLATION after compile. */
int dlf_fusion_add_op(DlfFusionOp* fusion, DlfOp* op);
int dlf_fusion_set_model_parallelism(DlfFusionOp* fusion, int mp);
/* Requires at least one op and a parallelism setting. */
int dlf_fusion_compile(DlfFusionOp* fusion);

DlfSession* dlf_session_create(const DlfCostConfig* cfg);
void dlf_session_destroy(DlfSession* session);
/* Rejects uncompiled containers (DLF_ERR_ORDER_VIOLATION) and parallelism
 * beyond the session's core count (DLF_ERR_BAD_MP). */
int dlf_session_add(DlfSession* session, DlfFusionOp* fusion);
/* Replays the cost model over the added blocks in order. Forward on a
 * session with no compiled blocks is an order violation. */
int dlf_session_forward(DlfSession* session, DlfRunSummary* summary);

#ifdef __cplusplus
}
#endif

#endif /* DLFSDK_H */
