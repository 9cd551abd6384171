/* The C interface, used from C through the shared library. */

#include <stdio.h>
#include <string.h>

#include "jlie/jlie.h"

static int failures = 0;

#define CHECK(cond)                                              \
  do {                                                           \
    if (!(cond)) {                                               \
      fprintf(stderr, "%s:%d: CHECK(%s) failed  last error: %s\n", \
              __FILE__, __LINE__, #cond, jlie_last_error());     \
      ++failures;                                                \
    }                                                            \
  } while (0)

static int contains(const char* s, const char* part) { return s && strstr(s, part) != NULL; }

static void basics(void) {
  jlie_options o;
  jlie_options_default(&o);
  CHECK(o.samples == 200);
  CHECK(o.tol == 1e-8);
  CHECK(o.seed == 42);
  CHECK(strlen(jlie_version()) > 0);
  CHECK(strcmp(jlie_status_name(JLIE_ERR_DOMAIN), "domain") == 0);
  jlie_string_free(NULL);
}

static void errors(jlie_catalog* cat) {
  jlie_catalog* bad = NULL;
  CHECK(jlie_catalog_load("/nonexistent/catalog.json", &bad) == JLIE_ERR_IO);
  CHECK(bad == NULL);
  CHECK(strlen(jlie_last_error()) > 0);
  CHECK(jlie_catalog_load(NULL, &bad) == JLIE_ERR_ARGUMENT);

  jlie_structure* s = NULL;
  CHECK(jlie_structure_from_entry(cat, "T9:nope", NULL, NULL, 0, &s) == JLIE_ERR_NOT_FOUND);
  CHECK(contains(jlie_last_error(), "T9:nope"));
  const char* names[] = {"a"};
  double one[] = {1.0};
  CHECK(jlie_structure_from_entry(cat, "T2:III-VIavii", names, one, 1, &s) == JLIE_ERR_ARGUMENT);
  CHECK(s == NULL);

  /* a successful call clears the message */
  char* js = NULL;
  CHECK(jlie_catalog_list(cat, &js) == JLIE_OK);
  CHECK(strcmp(jlie_last_error(), "") == 0);
  jlie_string_free(js);
}

static void structure(jlie_catalog* cat) {
  const char* names[] = {"b"};
  double values[] = {1.0};
  jlie_structure* s = NULL;
  CHECK(jlie_structure_from_entry(cat, "T2:III-IIIiv", names, values, 1, &s) == JLIE_OK);
  if (!s) return;

  jlie_options o;
  jlie_options_default(&o);
  int passed = 0;
  char* js = NULL;
  CHECK(jlie_verify(s, &o, &passed, &js) == JLIE_OK);
  CHECK(passed == 1);
  CHECK(contains(js, "\"route\": \"coordinate\""));
  jlie_string_free(js);

  js = NULL;
  CHECK(jlie_bracket(s, "y", "Ei1(-(y+z))*exp(-2*y)", "-1", &o, &passed, &js) == JLIE_OK);
  CHECK(passed == 1);
  jlie_string_free(js);

  js = NULL;
  CHECK(jlie_bracket(s, "exp(", "1", NULL, &o, &passed, &js) == JLIE_ERR_PARSE);
  CHECK(js == NULL);
  CHECK(jlie_bracket(s, "w", "1", NULL, &o, &passed, &js) == JLIE_ERR_PARSE);

  CHECK(jlie_hamiltonian_vf(s, "1", &o, &js) == JLIE_OK);
  CHECK(contains(js, "\"x\": \"(-1)\""));
  jlie_string_free(js);

  js = NULL;
  CHECK(jlie_symmetry(s, "1-exp(-(y-z))", &o, &passed, &js) == JLIE_OK);
  CHECK(passed == 1);
  jlie_string_free(js);
  js = NULL;
  CHECK(jlie_symmetry(s, "x", &o, &passed, &js) == JLIE_OK);
  CHECK(passed == 0);
  jlie_string_free(js);

  jlie_system* sys = NULL;
  CHECK(jlie_system_from_entry(s, 0, &sys) == JLIE_OK);
  CHECK(jlie_system_size(sys) == 2);
  const char* b[] = {"sin(t)", "1"};
  double x0[] = {1.0, 0.5, 0.2};
  char* traj = NULL;
  char* summary = NULL;
  CHECK(jlie_integrate(sys, b, 2, x0, 3, 0.0, 2.0, 1e-3, "y+z", 1e-6, 0, &traj, &summary) == JLIE_OK);
  CHECK(contains(traj, "t,x,y,z\n"));
  CHECK(contains(summary, "\"ok\": true"));
  jlie_string_free(traj);
  jlie_string_free(summary);
  CHECK(jlie_integrate(sys, b, 2, x0, 3, 0.0, 2.0, 0.0, NULL, 1e-6, 0, &traj, &summary) == JLIE_ERR_ARGUMENT);
  CHECK(jlie_integrate(sys, b, 1, x0, 3, 0.0, 2.0, 0.1, NULL, 1e-6, 0, &traj, &summary) == JLIE_ERR_ARGUMENT);
  jlie_system_free(sys);

  CHECK(jlie_system_from_entry(s, 9, &sys) == JLIE_ERR_ARGUMENT);
  jlie_structure_free(s);
}

static void inline_system(void) {
  const char* coords[] = {"x"};
  const char* comps[] = {"x^2"};
  jlie_system* sys = NULL;
  CHECK(jlie_system_inline(coords, 1, comps, 1, &sys) == JLIE_OK);
  const char* b[] = {"1"};
  double x0[] = {1.0};
  char* traj = NULL;
  char* summary = NULL;
  /* blow-up at t = 1 is reported as data, not as an error */
  CHECK(jlie_integrate(sys, b, 1, x0, 1, 0.0, 2.0, 0.01, NULL, 1e-8, 1, &traj, &summary) == JLIE_OK);
  CHECK(contains(summary, "\"stop\": \"domain_fault\""));
  jlie_string_free(traj);
  jlie_string_free(summary);
  jlie_system_free(sys);

  const char* bad[] = {"x +"};
  CHECK(jlie_system_inline(coords, 1, bad, 1, &sys) == JLIE_ERR_PARSE);
  jlie_system_free(NULL);
}

int main(void) {
  basics();
  jlie_catalog* cat = NULL;
  if (jlie_catalog_load(JLIE_CATALOG_PATH, &cat) != JLIE_OK) {
    fprintf(stderr, "cannot load catalog: %s\n", jlie_last_error());
    return 1;
  }
  errors(cat);
  structure(cat);
  inline_system();
  jlie_catalog_free(cat);
  if (failures) fprintf(stderr, "%d checks failed\n", failures);
  else printf("all C interface checks passed\n");
  return failures != 0;
}
