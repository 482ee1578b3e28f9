import { createApp } from './app.js';

const form = document.getElementById('connect-form') as HTMLFormElement;
const serverInput = document.getElementById('server-url') as HTMLInputElement;
const studentInput = document.getElementById('student-id') as HTMLInputElement;
const root = document.getElementById('app') as HTMLDivElement;

form.addEventListener('submit', async (event) => {
  event.preventDefault();
  const baseUrl = serverInput.value.replace(/\/+$/, '');
  const student = studentInput.value.trim() || 'guest';
  try {
    await createApp(root, baseUrl, student);
    form.hidden = true;
  } catch (err) {
    root.textContent = `Could not reach ${baseUrl}: ${err}`;
  }
});
