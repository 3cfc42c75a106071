/**
 * Shared view helpers. Like every module under views/, this file is held
 * to the no-math rule: values pass through to markup untouched.
 */

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

/**
 * A payload number exactly as the server sent it; null (the server's
 * encoding for missing or non-finite) becomes a placeholder so "NaN"
 * never reaches the screen.
 */
export function show(value: number | null | undefined): string {
  if (value === null || value === undefined || Number.isNaN(value)) {
    return "no data";
  }
  return String(value);
}

/** Placeholder for nullable labels that are metadata, not statistics. */
export function meta(value: number | string | null | undefined): string {
  if (value === null || value === undefined) return "—";
  return escapeHtml(String(value));
}
