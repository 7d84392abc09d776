// Table-first rendering: pure functions from the view state to HTML
// strings, kept free of DOM access so they unit-test without a browser.

import { ViewState } from './controller.js'

function esc(text: string): string {
  return text
    .replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
}

export function renderStateTables(view: ViewState): string {
  const vars = view.variables
    .map(v => `<tr><td>${esc(v.name)}</td><td>${esc(v.value)}</td></tr>`)
    .join('')
  const timers = view.timers
    .map(t =>
      `<tr><td>${esc(t.name)}</td><td>${t.value}</td>` +
      `<td>${t.mono ? 'mono' : '<span class="stopped">stopped</span>'}</td></tr>`)
    .join('')
  const clocks = view.clocks
    .map(c =>
      `<tr${c.urgent ? ' class="urgent"' : ''}><td>${esc(c.label)}</td>` +
      `<td>${c.value}</td><td>${c.urgent ? 'URGENT' : ''}</td></tr>`)
    .join('')
  const status = [
    `<div class="digest">step ${view.step} &middot; digest <code>${esc(view.digest)}</code></div>`,
    view.pendingEvent
      ? `<div class="pending">pending: ${esc(view.pendingEvent)}</div>` : '',
    view.lastTransition
      ? `<div class="last">last: ${esc(view.lastTransition)}</div>` : '',
  ].join('')
  return `
  ${status}
  <h3>Variables</h3>
  <table class="state"><tbody>${vars}</tbody></table>
  <h3>Timers</h3>
  <table class="timers"><tbody>${timers || '<tr><td>none</td></tr>'}</tbody></table>
  <h3>Clocks</h3>
  <table class="clocks"><tbody>${clocks}</tbody></table>`
}

export function renderEnabled(view: ViewState): string {
  if (view.enabled.length === 0) {
    return '<p>no transitions enabled</p>'
  }
  return view.enabled
    .map((e, k) => {
      const badge = e.urgent ? ' <span class="badge">urgent</span>' : ''
      const multi = e.successors > 1
        ? ` <span class="badge choices">${e.successors} outcomes</span>` : ''
      const disabled = e.clickable ? '' : ' disabled'
      return `<button class="fire" data-index="${k}"${disabled}>` +
        `${esc(e.label)}${badge}${multi}</button>`
    })
    .join('\n')
}

export function renderHistory(view: ViewState): string {
  const rows = view.history
    .map((h, k) => {
      const cls = h.inCycle ? ' class="cycle"' : ''
      return `<tr${cls}><td>${k + 1}</td><td>${esc(h.label)}</td>` +
        `<td><code>${esc(h.digest)}</code></td></tr>`
    })
    .join('')
  return `<table class="history"><thead><tr><th>#</th><th>transition</th>` +
    `<th>digest</th></tr></thead><tbody>${rows}</tbody></table>`
}

export function renderReplayControls(view: ViewState): string {
  if (!view.replay) return ''
  const { position, total, cycleStart } = view.replay
  const where = cycleStart !== null && position >= cycleStart
    ? ' <span class="badge cycle">in cycle</span>' : ''
  return `
  <div class="replay">
    trace replay: ${position}/${total}${where}
    <button data-replay="prev"${position === 0 ? ' disabled' : ''}>&laquo; prev</button>
    <button data-replay="next">next &raquo;</button>
    ${cycleStart !== null ? '<button data-replay="cycle">jump to cycle</button>' : ''}
    <button data-replay="leave">leave replay</button>
  </div>`
}

export function renderBanner(view: ViewState): string {
  if (!view.connected) {
    return '<div class="banner error">not connected' +
      ' <button data-action="retry">retry</button></div>'
  }
  if (view.error) {
    return `<div class="banner error">${esc(view.error)}</div>`
  }
  if (view.busy) {
    return '<div class="banner busy">working&hellip;</div>'
  }
  return ''
}
