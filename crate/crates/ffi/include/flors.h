#ifndef FLORS_H
#define FLORS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum FlorsStatus {
  FLORS_STATUS_OK = 0,
  FLORS_STATUS_NULL_POINTER = 1,
  FLORS_STATUS_INVALID_UTF8 = 2,
  FLORS_STATUS_IO = 3,
  FLORS_STATUS_PARSE = 4,
  FLORS_STATUS_INVALID_ARGUMENT = 5,
  FLORS_STATUS_SESSION = 6,
  FLORS_STATUS_INCOMPATIBLE = 7,
  FLORS_STATUS_INTERNAL = 8,
  FLORS_STATUS_PANIC = 9,
} FlorsStatus;

typedef enum FlorsMode {
  FLORS_MODE_STATIC = 0,
  FLORS_MODE_BATCH = 1,
  FLORS_MODE_ONLINE = 2,
} FlorsMode;

// Opaque tagging session.
typedef struct FlorsSession FlorsSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Opens a session from a model file and a store file.
//
// # Safety
// Path arguments must be valid NUL-terminated strings; `out` must be
// writable. The handle is released with [`flors_session_free`].
enum FlorsStatus flors_session_open(const char *model_path,
                                    const char *store_path,
                                    enum FlorsMode mode,
                                    struct FlorsSession **out);

// Releases a session. Null is ignored.
//
// # Safety
// `session` must come from [`flors_session_open`] and not be used again.
void flors_session_free(struct FlorsSession *session);

// Tags one whitespace-separated sentence. `*out_tags` receives the tags
// joined by tabs.
//
// # Safety
// `session` must be a live handle, `sentence` a NUL-terminated string and
// `out_tags` writable.
enum FlorsStatus flors_tag(struct FlorsSession *session, const char *sentence, char **out_tags);

// Accumulates the whole test set before tagging (batch mode only).
// Sentences are separated by newlines, tokens by whitespace.
//
// # Safety
// `session` must be a live handle and `text` a NUL-terminated string.
enum FlorsStatus flors_prepare_batch(struct FlorsSession *session, const char *text);

// Hex SHA-256 digest of the session's current count store.
//
// # Safety
// `session` must be a live handle and `out` writable.
enum FlorsStatus flors_store_digest(struct FlorsSession *session, char **out);

// Writes the session's current store (with its lexicons) to `path`.
//
// # Safety
// `session` must be a live handle and `path` a NUL-terminated string.
enum FlorsStatus flors_save_store(struct FlorsSession *session, const char *path);

// Number of tokens tagged so far; 0 for a null handle.
//
// # Safety
// `session` must be null or a live handle.
uint64_t flors_tokens_tagged(const struct FlorsSession *session);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be used again.
void flors_string_free(char *s);

// Message of the last failed call on this thread, or null. Valid until
// the next call into the library on the same thread.
const char *flors_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FLORS_H */
