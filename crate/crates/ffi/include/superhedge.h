#ifndef SUPERHEDGE_H
#define SUPERHEDGE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes returned by every entry point.
 */
typedef enum ShStatus {
  SH_STATUS_OK = 0,
  SH_STATUS_NULL_POINTER = 1,
  SH_STATUS_INVALID_UTF8 = 2,
  SH_STATUS_IO = 3,
  SH_STATUS_PARSE = 4,
  SH_STATUS_INVALID_MARKET = 5,
  SH_STATUS_ARBITRAGE = 6,
  SH_STATUS_TIME_OUT_OF_RANGE = 7,
  SH_STATUS_NEGATIVE_CLAIM = 8,
  SH_STATUS_INTERNAL = 9,
} ShStatus;

/*
 Opaque claim bound to the market it was parsed against.
 */
typedef struct ShClaim ShClaim;

/*
 Opaque arbitrage-free market.
 */
typedef struct ShMarket ShMarket;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Parses a market from its text form and checks it is free of arbitrage.

 # Safety
 `text` must be a nul-terminated string and `out` valid for writes.
 */
enum ShStatus sh_market_from_str(const char *text, struct ShMarket **out);

/*
 Like [`sh_market_from_str`], reading the text from a file.

 # Safety
 `path` must be a nul-terminated string and `out` valid for writes.
 */
enum ShStatus sh_market_from_file(const char *path, struct ShMarket **out);

/*
 # Safety
 `market` must be null or a handle from this library, not yet freed.
 */
void sh_market_free(struct ShMarket *market);

/*
 Writes the horizon `T`.

 # Safety
 `market` must be a live handle and `out` valid for writes.
 */
enum ShStatus sh_market_horizon(const struct ShMarket *market, size_t *out);

/*
 Writes the number of atoms (nodes) at level `t`.

 # Safety
 `market` must be a live handle and `out` valid for writes.
 */
enum ShStatus sh_market_atoms(const struct ShMarket *market, size_t t, size_t *out);

/*
 Parses a claim file body (`<leaf> <value>` lines) against `market`.

 # Safety
 `market` must be a live handle, `text` nul-terminated, `out` valid for writes.
 */
enum ShStatus sh_claim_from_str(const struct ShMarket *market,
                                const char *text,
                                struct ShClaim **out);

/*
 # Safety
 `claim` must be null or a handle from this library, not yet freed.
 */
void sh_claim_free(struct ShClaim *claim);

/*
 Superhedging price `E_t(H)` per atom.

 # Safety
 Handles must be live and `out` valid for writes.
 */
enum ShStatus sh_superhedge(const struct ShMarket *market,
                            const struct ShClaim *claim,
                            size_t t,
                            char **out);

/*
 Subhedging price `E*_t(H)` per atom.

 # Safety
 Handles must be live and `out` valid for writes.
 */
enum ShStatus sh_subhedge(const struct ShMarket *market,
                          const struct ShClaim *claim,
                          size_t t,
                          char **out);

/*
 Supremum of `E_Q[H | F_t]` over equivalent martingale measures.

 # Safety
 Handles must be live and `out` valid for writes.
 */
enum ShStatus sh_upper_price(const struct ShMarket *market,
                             const struct ShClaim *claim,
                             size_t t,
                             char **out);

/*
 Infimum of `E_Q[H | F_t]` over equivalent martingale measures.

 # Safety
 Handles must be live and `out` valid for writes.
 */
enum ShStatus sh_lower_price(const struct ShMarket *market,
                             const struct ShClaim *claim,
                             size_t t,
                             char **out);

/*
 No-arbitrage interval per atom, one line each: `(l, u)` when open,
 `[p]` when degenerate, with `l`, `u`, `p` as `num/den`.

 # Safety
 Handles must be live and `out` valid for writes.
 */
enum ShStatus sh_price_interval(const struct ShMarket *market,
                                const struct ShClaim *claim,
                                size_t t,
                                char **out);

/*
 Message of the last failure on this thread as a new string, or null.
 */
char *sh_last_error(void);

/*
 Releases a string returned by this library.

 # Safety
 `s` must be null or a string from this library, not yet freed.
 */
void sh_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUPERHEDGE_H */
