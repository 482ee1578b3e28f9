// The test page lives on http://localhost while the backend answers on
// 127.0.0.1, so happy-dom would demand CORS headers the service never
// sends. Its browser settings are live; loosen the fetch policy here.

type FetchSettings = { fetch?: { disableSameOriginPolicy?: boolean } };

const api = (globalThis as { happyDOM?: { settings?: FetchSettings } }).happyDOM;
if (api?.settings) {
  api.settings.fetch = { ...api.settings.fetch, disableSameOriginPolicy: true };
}
