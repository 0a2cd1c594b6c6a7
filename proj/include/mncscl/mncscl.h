#ifndef MNCSCL_H
#define MNCSCL_H

#ifdef __cplusplus
extern "C" {
#endif

/* Multiple node-centered subgraphs contrastive learning: C interface.
 *
 * A session holds one run configuration. Load a config (file or JSON
 * text), optionally override individual fields, then call mncscl_run.
 * All functions returning int use the exit-code convention below.
 */

#define MNCSCL_OK 0
#define MNCSCL_CONFIG_ERROR 1
#define MNCSCL_RUNTIME_ERROR 2

typedef struct mncscl_session mncscl_session;

const char* mncscl_version(void);

/* Returns NULL only on allocation failure. */
mncscl_session* mncscl_session_create(void);
void mncscl_session_destroy(mncscl_session* s);

int mncscl_load_config_file(mncscl_session* s, const char* path);
int mncscl_load_config_json(mncscl_session* s, const char* json_text);

/* Overrides, applied after loading. */
int mncscl_set_command(mncscl_session* s, const char* command);
int mncscl_set_out_dir(mncscl_session* s, const char* dir);
int mncscl_set_dataset(mncscl_session* s, const char* bundle_dir);
int mncscl_set_checkpoint(mncscl_session* s, const char* path);
/* Sets the three named seeds to base, base+1, base+2. */
int mncscl_set_seed(mncscl_session* s, unsigned long long base);
int mncscl_set_loss(mncscl_session* s, const char* mode);     /* "cv" | "fg" */
int mncscl_set_subgraphs(mncscl_session* s, const char* csv); /* "basic,full,..." */

/* Executes the configured command; writes outputs to the out directory. */
int mncscl_run(mncscl_session* s);

/* Message from the most recent failing call on s; "" when none. The
 * pointer stays valid until the next call on s or destruction. */
const char* mncscl_last_error(const mncscl_session* s);

#ifdef __cplusplus
}
#endif

#endif /* MNCSCL_H */
