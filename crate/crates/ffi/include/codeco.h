#ifndef CODECO_H
#define CODECO_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum CodecoStatus {
  CODECO_STATUS_OK = 0,
  CODECO_STATUS_NULL_ARGUMENT = 1,
  CODECO_STATUS_INVALID_UTF8 = 2,
  CODECO_STATUS_IO = 3,
  CODECO_STATUS_INVALID_GRAMMAR = 4,
  CODECO_STATUS_UNKNOWN_START = 5,
  CODECO_STATUS_EMPTY_HISTORY = 6,
  CODECO_STATUS_PANIC = 7,
} CodecoStatus;

/**
 * A loaded and validated grammar.
 */
typedef struct CodecoGrammar CodecoGrammar;

/**
 * A parsing session: the states after each accepted token.
 */
typedef struct CodecoSession CodecoSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Returns the message of the last failed call on this thread, or null.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *codeco_last_error(void);

/**
 * Parses and validates grammar source text.
 *
 * # Safety
 * `source` must be a nul-terminated string and `out_grammar` a writable pointer.
 */
enum CodecoStatus codeco_grammar_load(const char *source, struct CodecoGrammar **out_grammar);

/**
 * Reads, parses and validates a grammar file.
 *
 * # Safety
 * `path` must be a nul-terminated string and `out_grammar` a writable pointer.
 */
enum CodecoStatus codeco_grammar_load_file(const char *path, struct CodecoGrammar **out_grammar);

/**
 * Releases a grammar. Sessions created from it stay usable.
 *
 * # Safety
 * `grammar` must come from `codeco_grammar_load*` and not be freed twice.
 */
void codeco_grammar_free(struct CodecoGrammar *grammar);

/**
 * Number of rules, syntactic and lexical.
 *
 * # Safety
 * `grammar` must be a live grammar handle.
 */
enum CodecoStatus codeco_grammar_rule_count(const struct CodecoGrammar *grammar, size_t *out_count);

/**
 * Starts a session. A null `start` selects the grammar's start category.
 *
 * # Safety
 * `grammar` must be a live grammar handle, `start` null or a
 * nul-terminated string, and `out_session` a writable pointer.
 */
enum CodecoStatus codeco_session_new(const struct CodecoGrammar *grammar,
                                     const char *start,
                                     struct CodecoSession **out_session);

/**
 * Releases a session.
 *
 * # Safety
 * `session` must come from `codeco_session_new` and not be freed twice.
 */
void codeco_session_free(struct CodecoSession *session);

/**
 * Appends a token if it can continue the sentence. A rejected token leaves
 * the session unchanged and sets `accepted` to false.
 *
 * # Safety
 * `session` must be a live session handle, `token` a nul-terminated string
 * and `accepted` a writable pointer.
 */
enum CodecoStatus codeco_session_feed(struct CodecoSession *session,
                                      const char *token,
                                      bool *accepted);

/**
 * Removes the last accepted token.
 *
 * # Safety
 * `session` must be a live session handle.
 */
enum CodecoStatus codeco_session_pop(struct CodecoSession *session);

/**
 * Number of accepted tokens.
 *
 * # Safety
 * `session` must be a live session handle and `out_len` writable.
 */
enum CodecoStatus codeco_session_len(const struct CodecoSession *session, size_t *out_len);

/**
 * Whether the accepted tokens form a complete sentence.
 *
 * # Safety
 * `session` must be a live session handle and `out_complete` writable.
 */
enum CodecoStatus codeco_session_is_complete(const struct CodecoSession *session,
                                             bool *out_complete);

/**
 * The possible next tokens, one `token<TAB>category` line each, in the
 * same order and format as `codeco complete`.
 *
 * # Safety
 * `session` must be a live session handle and `out_text` writable. The
 * result must be released with `codeco_string_free`.
 */
enum CodecoStatus codeco_session_next_tokens(const struct CodecoSession *session, char **out_text);

/**
 * The accessible antecedents as a JSON array of `{position, features}`.
 *
 * # Safety
 * As for `codeco_session_next_tokens`.
 */
enum CodecoStatus codeco_session_antecedents_json(const struct CodecoSession *session,
                                                  char **out_text);

/**
 * The syntax trees of a complete sentence as a JSON array; empty if the
 * sentence is incomplete.
 *
 * # Safety
 * As for `codeco_session_next_tokens`.
 */
enum CodecoStatus codeco_session_trees_json(const struct CodecoSession *session, char **out_text);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void codeco_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CODECO_H */
