#ifndef LCFRS_H
#define LCFRS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LcfrsStatus {
  LCFRS_STATUS_OK = 0,
  // The sentence is not in the language.
  LCFRS_STATUS_REJECT = 1,
  LCFRS_STATUS_NULL_ARGUMENT = 2,
  LCFRS_STATUS_INVALID_UTF8 = 3,
  // Syntax or validation error in the grammar text.
  LCFRS_STATUS_GRAMMAR = 4,
  // The grammar cannot be recognized with, or the input is too large.
  LCFRS_STATUS_RECOGNITION = 5,
  LCFRS_STATUS_INTERNAL = 6,
} LcfrsStatus;

typedef enum LcfrsBackend {
  LCFRS_BACKEND_NAIVE = 0,
  LCFRS_BACKEND_BITSET = 1,
  LCFRS_BACKEND_STRASSEN = 2,
} LcfrsBackend;

typedef enum LcfrsClosure {
  LCFRS_CLOSURE_FIXPOINT = 0,
  LCFRS_CLOSURE_VALIANT = 1,
} LcfrsClosure;

// A parsed, validated grammar.
typedef struct LcfrsGrammar LcfrsGrammar;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parses grammar text. On success `*out` receives a handle to release with
// `lcfrs_grammar_free`.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum LcfrsStatus lcfrs_grammar_parse(const char *text, struct LcfrsGrammar **out);

// Loads one of the grammars shipped with the library by name.
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
enum LcfrsStatus lcfrs_grammar_bundled(const char *name, struct LcfrsGrammar **out);

// # Safety
// `g` must be null or a handle from this library that was not yet freed.
void lcfrs_grammar_free(struct LcfrsGrammar *g);

// # Safety
// `g` must be a live handle and `out` a valid pointer.
enum LcfrsStatus lcfrs_contact_rank(const struct LcfrsGrammar *g, size_t *out);

// # Safety
// `g` must be a live handle and `out` a valid pointer.
enum LcfrsStatus lcfrs_is_balanced(const struct LcfrsGrammar *g, bool *out);

// Recognizes a whitespace-separated sentence. Returns `LCFRS_STATUS_OK` on
// acceptance and `LCFRS_STATUS_REJECT` otherwise.
//
// # Safety
// `g` must be a live handle and `sentence` a NUL-terminated string.
enum LcfrsStatus lcfrs_recognize(const struct LcfrsGrammar *g,
                                 const char *sentence,
                                 enum LcfrsBackend backend,
                                 enum LcfrsClosure closure);

// Writes a derivation of the sentence as JSON to `*out`, or the string
// `null` with status `LCFRS_STATUS_REJECT`.
//
// # Safety
// `g` must be a live handle, `sentence` a NUL-terminated string and `out`
// a valid pointer.
enum LcfrsStatus lcfrs_parse_json(const struct LcfrsGrammar *g, const char *sentence, char **out);

// Writes the analysis report as JSON to `*out`. A non-positive `omega`
// selects the default exponent.
//
// # Safety
// `g` must be a live handle and `out` a valid pointer.
enum LcfrsStatus lcfrs_analyze_json(const struct LcfrsGrammar *g, double omega, char **out);

// # Safety
// `s` must be null or a string returned by this library.
void lcfrs_string_free(char *s);

// The message for the last failed call on this thread, or null. The
// pointer stays valid until the next call into the library.
const char *lcfrs_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LCFRS_H */
