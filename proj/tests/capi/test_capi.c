/* Exercises the shared library through its C header only. */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "hetlab/hetlab.h"

static int failures = 0;

#define EXPECT(cond)                                                   \
  do {                                                                 \
    if (!(cond)) {                                                     \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                      \
    }                                                                  \
  } while (0)

static const char* kBox =
    "{\"b11\":[3,3],\"b12\":[1,1],\"b13\":[-1,-1],\"b14\":[-1,-1],"
    "\"b21\":[1,1],\"b22\":[-0.1,-0.1],\"b23\":[-1,-1],\"b24\":[-1,-1],"
    "\"b31\":[1,1],\"b32\":[-1,-1],\"b33\":[-1,-1],\"b34\":[-1,-1],"
    "\"b41\":[1.2,1.2],\"b42\":[-1,-1],\"b43\":[-1,-1],\"b44\":[-1,-1],"
    "\"c1\":[-1,-1],\"c3\":[-1,-1],\"c4\":[-1,-1],"
    "\"d2\":[-4,-4],\"d3\":[4,4],\"d4\":[5,5]}";

static void test_coefficients(void) {
  hetlab_coeffs* c = NULL;
  EXPECT(hetlab_coeffs_reference(&c) == HETLAB_OK);
  double v = 0;
  EXPECT(hetlab_coeffs_get(c, "b41", &v) == HETLAB_OK && v == 1.2);
  EXPECT(hetlab_coeffs_get(c, "b15", &v) == HETLAB_E_PARSE);
  EXPECT(strstr(hetlab_last_error(), "b15") != NULL);
  EXPECT(hetlab_coeffs_set(c, "d4", NAN) == HETLAB_E_DOMAIN);

  char* json = NULL;
  EXPECT(hetlab_coeffs_to_json(c, &json) == HETLAB_OK);
  hetlab_coeffs* back = NULL;
  EXPECT(hetlab_coeffs_from_json(json, &back) == HETLAB_OK);
  EXPECT(hetlab_coeffs_get(back, "d2", &v) == HETLAB_OK && v == -4.0);
  hetlab_string_free(json);
  hetlab_coeffs_free(back);

  EXPECT(hetlab_coeffs_from_json("{\"b11\": 1}", &back) == HETLAB_E_PARSE);
  EXPECT(back == NULL);
  EXPECT(hetlab_coeffs_from_json(NULL, &back) == HETLAB_E_INVALID_ARGUMENT);

  const double x[4] = {1, 1, 0, 0};
  double f[4], jac[16];
  EXPECT(hetlab_eval_field(c, x, f) == HETLAB_OK);
  EXPECT(fabs(f[0] - 4.0) < 1e-15 && fabs(f[1] + 2.1) < 1e-15 && f[2] == 0 && f[3] == 0);
  const double origin[4] = {0, 0, 0, 0};
  EXPECT(hetlab_eval_jacobian(c, origin, jac) == HETLAB_OK);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) EXPECT(jac[4 * i + j] == (i == j ? 1.0 : 0.0));
  const double bad[4] = {NAN, 0, 0, 0};
  EXPECT(hetlab_eval_field(c, bad, f) == HETLAB_E_DOMAIN);
  hetlab_coeffs_free(c);
}

static void test_check(void) {
  hetlab_coeffs* c = NULL;
  hetlab_coeffs_reference(&c);
  char* report = NULL;
  int pass = -1;
  EXPECT(hetlab_check(c, &report, &pass) == HETLAB_OK);
  EXPECT(pass == 1);
  EXPECT(strstr(report, "\"conditions\"") && strstr(report, "\"construction\""));
  EXPECT(strstr(report, "\"C17\""));
  hetlab_string_free(report);

  hetlab_coeffs_set(c, "c1", 1.0);
  EXPECT(hetlab_check(c, &report, &pass) == HETLAB_OK);
  EXPECT(pass == 0);
  hetlab_string_free(report);
  hetlab_coeffs_free(c);
}

static void test_find(void) {
  char* result = NULL;
  int found = -1;
  EXPECT(hetlab_find("table1_literal", kBox, 1, 10, 1, &result, &found) == HETLAB_OK);
  EXPECT(found == 1);
  EXPECT(strstr(result, "\"found\"") && strstr(result, "\"sample_index\": 0"));
  hetlab_string_free(result);
  EXPECT(hetlab_find("sideways", kBox, 1, 10, 1, &result, &found) == HETLAB_E_CONFIG);
  EXPECT(hetlab_find("table1_literal", "{}", 1, 10, 1, &result, &found) != HETLAB_OK);
}

static void test_simulate(void) {
  hetlab_coeffs* c = NULL;
  hetlab_coeffs_reference(&c);
  const double x0[4] = {0.5, 0, 0, 0};
  char *csv = NULL, *info = NULL;
  EXPECT(hetlab_simulate(c, x0, 2.0, &csv, &info) == HETLAB_OK);
  EXPECT(strncmp(csv, "t,x1,x2,x3,x4\n", 14) == 0);
  EXPECT(strstr(info, "\"termination\""));
  hetlab_string_free(csv);
  hetlab_string_free(info);
  EXPECT(hetlab_simulate(c, x0, -1.0, &csv, &info) == HETLAB_E_CONFIG);
  hetlab_coeffs_free(c);
}

static void test_experiments(void) {
  hetlab_coeffs* c = NULL;
  hetlab_coeffs_reference(&c);
  char *report = NULL, *csv = NULL;
  EXPECT(hetlab_basin_fraction(c, "P14cycle", 1e-3, 4, 7, 1, &report, &csv) == HETLAB_OK);
  EXPECT(strstr(report, "\"counts\""));
  EXPECT(strncmp(csv, "sample,seed,outcome,loops,final_phi\n", 36) == 0);
  hetlab_string_free(report);
  hetlab_string_free(csv);
  EXPECT(hetlab_basin_fraction(c, "P15cycle", 1e-3, 4, 7, 1, &report, NULL) == HETLAB_E_CONFIG);
  EXPECT(hetlab_basin_fraction(c, "P13cycle", 1e-3, 0, 7, 1, &report, NULL) ==
         HETLAB_E_PRECONDITION);

  EXPECT(hetlab_adjudicate(c, "{\"skip_basin\": true}", &report) == HETLAB_OK);
  EXPECT(strstr(report, "\"principal_plane\": \"P14\""));
  EXPECT(strstr(report, "\"anomalies\""));
  hetlab_string_free(report);
  EXPECT(hetlab_adjudicate(c, "{\"samples\": \"many\"}", &report) != HETLAB_OK);

  hetlab_coeffs_set(c, "d3", -5.0);
  hetlab_coeffs_set(c, "d4", -6.0);
  const double sink[4] = {1.5 + sqrt(3.25), 0, 0, 0};
  EXPECT(hetlab_stability_index(c, NULL, 0.5, sink, 3, 10, 1, 1, &report) == HETLAB_OK);
  EXPECT(strstr(report, "IndexPlusInfinityLike"));
  hetlab_string_free(report);
  hetlab_coeffs_free(c);
}

int main(void) {
  EXPECT(strlen(hetlab_version()) > 0);
  EXPECT(strcmp(hetlab_status_name(HETLAB_E_PARSE), "Parse") == 0);
  test_coefficients();
  test_check();
  test_find();
  test_simulate();
  test_experiments();
  if (failures) {
    fprintf(stderr, "%d failures\n", failures);
    return 1;
  }
  puts("capi: all checks passed");
  return 0;
}
